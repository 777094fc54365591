"""Stratified measures on the moduli of abelian varieties and Monte Carlo volumes.

Each stratum ``A_g`` carries the measure ``det(Y)^-(g+1) dX dY`` restricted
to the fundamental domain (the normalising constant of the invariant volume
is fixed to one).  With this choice ``vol(A_1) = pi/3`` and
``vol(A_2) = pi^3/270``.

Samplers draw from simple proposal densities covering the domain and attach
importance weights, so that for ``n`` proposals

    int f dmu_g  ~  (1/n) sum_i w_i f(Z_i)

with ``w_i = 0`` for rejected proposals.  Sampling is split into fixed-size
chunks with independent seeded streams; partial sums are combined in chunk
order, so estimates do not depend on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import integrate

from .errors import InvalidConfig, Unsupported
from .reduction import fundamental_domain_mask
from .siegel import SiegelPoint

DEFAULT_SEED = 20240229
CHUNK_SIZE = 1 << 16
MAX_VOLUME_GENUS = 2

SQRT3_2 = math.sqrt(3) / 2
# normalising constants of the proposal densities
_Q1 = 2 / math.sqrt(3)
_Q2 = 2 / (9 * math.sqrt(3))

Integrand = Callable[[np.ndarray, int], np.ndarray]


# ---------------------------------------------------------------------------
# Configuration and results


@dataclass(frozen=True)
class StratifiedMeasureConfig:
    """Genus weights ``lambda_g`` and sampling options.

    Either ``weights`` (explicit, every value > 0) or ``alpha`` (string
    weights ``exp(-alpha (2g - 2))`` for ``g <= truncation_genus``) must be
    given.  Genus zero is a single point; it contributes ``lambda_0 f(pt)``
    only when ``include_genus_zero`` is set.
    """

    weights: Mapping[int, float] | None = None
    alpha: float | None = None
    truncation_genus: int = 2
    seed: int = DEFAULT_SEED
    include_genus_zero: bool = False

    def __post_init__(self):
        if (self.weights is None) == (self.alpha is None):
            raise InvalidConfig("give exactly one of explicit weights or alpha")
        if self.alpha is not None and not (math.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidConfig(f"alpha must be positive, got {self.alpha}")
        if not 0 <= self.truncation_genus <= MAX_VOLUME_GENUS:
            raise Unsupported(f"truncation genus must be in [0, {MAX_VOLUME_GENUS}], got {self.truncation_genus}")
        if not 0 <= int(self.seed) < 1 << 64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")
        if self.weights is not None:
            w = {int(g): float(v) for g, v in self.weights.items()}
            for g, v in w.items():
                if not (math.isfinite(v) and v > 0):
                    raise InvalidConfig(f"weight for genus {g} must be positive, got {v}")
                if g < 0 or g > MAX_VOLUME_GENUS:
                    raise Unsupported(f"no volume sampler for genus {g}")
            object.__setattr__(self, "weights", dict(sorted(w.items())))

    @classmethod
    def explicit(cls, weights: Mapping[int, float], **kw) -> "StratifiedMeasureConfig":
        return cls(weights=weights, **kw)

    @classmethod
    def string(cls, alpha: float, truncation_genus: int = 2, **kw) -> "StratifiedMeasureConfig":
        return cls(alpha=alpha, truncation_genus=truncation_genus, **kw)

    def lambdas(self) -> dict[int, float]:
        if self.weights is not None:
            lam = dict(self.weights)
        else:
            lam = {g: math.exp(-self.alpha * (2 * g - 2)) for g in range(0, self.truncation_genus + 1)}
        if not self.include_genus_zero:
            lam.pop(0, None)
        return lam


@dataclass(frozen=True)
class MCResult:
    estimate: float
    stderr: float
    n_samples: int
    seed: int
    components: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class WeightedSample:
    """Accepted points ``(m, g, g)`` with importance weights, out of ``n_proposed`` draws."""

    genus: int
    Z: np.ndarray
    weights: np.ndarray
    n_proposed: int

    def points(self) -> list[SiegelPoint]:
        return [SiegelPoint.from_complex(z) for z in self.Z]


# ---------------------------------------------------------------------------
# Samplers


def _propose(g: int, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Proposals and their weights ``target / proposal`` (before the domain test).

    g = 1: ``y = (sqrt3/2) / U`` has density ``(sqrt3/2) / y^2`` on
    ``[sqrt3/2, inf)``; ``x`` is uniform on ``[-1/2, 1/2]``.

    g = 2: on the Minkowski cone ``0 <= 2 y12 <= y11 <= y22``,
    ``y11 = (sqrt3/2) U1^(-1/3)`` (density ``3 a^3 / y11^4``),
    ``y22 = y11 U2^(-1/2)`` (density ``2 y11^2 / y22^3``), ``y12`` uniform on
    ``[0, y11/2]`` and ``X`` uniform on the unit box.  The proposal density is
    ``(9 sqrt3 / 2) / (y11 y22)^3``.
    """
    if g == 1:
        u = rng.random((n, 2))
        x = u[:, 0] - 0.5
        y = SQRT3_2 / (1.0 - u[:, 1])
        Z = (x + 1j * y).reshape(n, 1, 1)
        return Z, np.full(n, _Q1)
    if g == 2:
        u = rng.random((n, 6))
        y11 = SQRT3_2 * (1.0 - u[:, 0]) ** (-1 / 3)
        y22 = y11 / np.sqrt(1.0 - u[:, 1])
        y12 = u[:, 2] * y11 / 2
        X = u[:, 3:] - 0.5
        det = y11 * y22 - y12**2
        w = _Q2 * (y11 * y22) ** 3 / det**3
        Z = np.empty((n, 2, 2), dtype=complex)
        Z[:, 0, 0] = X[:, 0] + 1j * y11
        Z[:, 1, 1] = X[:, 1] + 1j * y22
        Z[:, 0, 1] = Z[:, 1, 0] = X[:, 2] + 1j * y12
        return Z, w
    raise Unsupported(f"no fundamental domain sampler for genus {g}")


def _draw(g: int, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    Z, w = _propose(g, n, rng)
    return Z, np.where(fundamental_domain_mask(Z), w, 0.0)


def sample_fundamental_domain(g: int, n: int, seed: int = DEFAULT_SEED) -> WeightedSample:
    """Draw ``n`` proposals and keep those inside the fundamental domain."""
    if g not in (1, 2):
        raise Unsupported(f"no fundamental domain sampler for genus {g}")
    rng = np.random.default_rng(seed)
    Z, w = _draw(g, n, rng)
    keep = w > 0
    return WeightedSample(g, Z[keep], w[keep], n)


# ---------------------------------------------------------------------------
# Integration


def integrand_one(Z: np.ndarray, g: int) -> np.ndarray:
    return np.ones(Z.shape[0])


def integrand_inv_det_y(Z: np.ndarray, g: int) -> np.ndarray:
    if g == 0:
        return np.ones(Z.shape[0])
    return 1.0 / np.linalg.det(Z.imag)


NAMED_INTEGRANDS: dict[str, Integrand] = {
    "one": integrand_one,
    "inv_det_y": integrand_inv_det_y,
}


def _resolve(f) -> Integrand:
    if callable(f):
        return f
    try:
        return NAMED_INTEGRANDS[f]
    except KeyError:
        raise InvalidConfig(f"unknown integrand {f!r}; choose from {sorted(NAMED_INTEGRANDS)}") from None


def _chunk_sums(g: int, f: Integrand, seed: int, index: int, size: int) -> tuple[float, float]:
    ss = np.random.SeedSequence(seed, spawn_key=(g, index))
    rng = np.random.default_rng(ss)
    Z, w = _draw(g, size, rng)
    vals = np.zeros(size)
    hit = w > 0
    if np.any(hit):
        vals[hit] = w[hit] * np.asarray(f(Z[hit], g), dtype=float)
    return float(vals.sum()), float(np.dot(vals, vals))


def _chunks(n: int, chunk: int) -> list[int]:
    sizes = [chunk] * (n // chunk)
    if n % chunk:
        sizes.append(n % chunk)
    return sizes


def integrate_stratum(
    f,
    g: int,
    n: int,
    *,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    chunk: int = CHUNK_SIZE,
) -> MCResult:
    """Monte Carlo estimate of ``int_{A_g} f dmu_g`` from ``n`` proposals."""
    if g not in (1, 2):
        raise Unsupported(f"no fundamental domain sampler for genus {g}")
    if n < 2:
        raise InvalidConfig("need at least two samples")
    f = _resolve(f)
    sizes = _chunks(int(n), int(chunk))
    jobs = list(enumerate(sizes))
    run = lambda job: _chunk_sums(g, f, seed, job[0], job[1])  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    s = s2 = 0.0
    for a, b in parts:  # fixed chunk order
        s += a
        s2 += b
    mean = s / n
    var = max(s2 / n - mean**2, 0.0) * n / (n - 1)
    return MCResult(mean, math.sqrt(var / n), int(n), int(seed))


def _genus_one_quadrature(f=None) -> tuple[float, float]:
    """``int int f dx dy / y^2`` over ``|x| <= 1/2, y >= sqrt(1 - x^2)``."""
    if f is None:
        h = lambda y, x: 1.0 / y**2  # noqa: E731
    else:
        h = lambda y, x: f(x, y) / y**2  # noqa: E731
    val, err = integrate.dblquad(h, -0.5, 0.5, lambda x: math.sqrt(1 - x * x), lambda x: np.inf, epsabs=1e-12, epsrel=1e-12)
    return float(val), float(err)


def stratum_volume(
    g: int,
    n: int = 1_000_000,
    *,
    quadrature: bool = False,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> MCResult:
    """Volume of ``A_g`` for the measure ``det(Y)^-(g+1) dX dY``."""
    if g not in (1, 2):
        raise Unsupported(f"volumes are available for genus 1 and 2, got {g}")
    if quadrature:
        if g != 1:
            raise Unsupported("the quadrature route is implemented for genus 1")
        val, err = _genus_one_quadrature()
        return MCResult(val, err, 0, int(seed))
    return integrate_stratum("one", g, n, seed=seed, workers=workers)


def integrate_stratified(
    f,
    config: StratifiedMeasureConfig,
    n: int = 200_000,
    *,
    workers: int = 1,
) -> MCResult:
    """``sum_g lambda_g int f dmu_g`` with independent strata.

    ``f(Z, g)`` takes a batch ``(m, g, g)`` of complex matrices and returns
    ``m`` values; it must be a pure function.  The genus zero atom is
    evaluated on an empty ``(1, 0, 0)`` batch.
    """
    f = _resolve(f)
    total = 0.0
    var = 0.0
    comps = {}
    n_total = 0
    for g, lam in config.lambdas().items():
        if g == 0:
            val = float(np.asarray(f(np.zeros((1, 0, 0), dtype=complex), 0), dtype=float)[0])
            comps[0] = MCResult(val, 0.0, 1, int(config.seed))
            total += lam * val
            continue
        r = integrate_stratum(f, g, n, seed=config.seed, workers=workers)
        comps[g] = r
        total += lam * r.estimate
        var += (lam * r.stderr) ** 2
        n_total += r.n_samples
    return MCResult(total, math.sqrt(var), n_total, int(config.seed), comps)


# ---------------------------------------------------------------------------
# Dirichlet energy and the truncated partition function


@dataclass(frozen=True, eq=False)
class TorusMapSpec:
    """Affine map of the torus ``C / (Z + tau Z)`` to ``R^N / lattice``.

    ``p`` and ``q`` are the translations picked up along the generators
    ``1`` and ``tau``.
    """

    tau: SiegelPoint
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        if self.tau.genus != 1:
            raise InvalidConfig("tau must be a genus one point")
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        if p.ndim != 1 or p.shape != q.shape:
            raise InvalidConfig(f"p and q must be vectors of equal length, got {p.shape} and {q.shape}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def N(self) -> int:
        return self.p.size


def dirichlet_energy_torus(spec: TorusMapSpec) -> float:
    """``int |dh|^2`` of the harmonic (affine) representative."""
    t = complex(spec.tau.Z[0, 0])
    p, q = spec.p, spec.q
    E = (p @ p * abs(t) ** 2 - 2 * (p @ q) * t.real + q @ q) / t.imag
    return float(max(E, 0.0))


@dataclass(frozen=True)
class PartitionResult:
    value: float
    stderr: float
    tail_bound: float
    terms: dict
    n_samples: int
    seed: int


def partition_function(
    alpha: float,
    truncation_genus: int = 2,
    integrand="one",
    *,
    n: int = 200_000,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    include_genus_zero: bool = False,
) -> PartitionResult:
    """Truncated sum ``sum_{g <= G} exp(-alpha (2g - 2)) I_g``.

    ``I_g`` is the moduli integral of the chosen integrand.  The reported
    tail bound ``C exp(-2 alpha G) / (1 - exp(-2 alpha))`` uses ``C`` = the
    largest observed ``|I_g|``; it is a heuristic, not a proven bound.
    """
    cfg = StratifiedMeasureConfig.string(
        alpha, truncation_genus, seed=seed, include_genus_zero=include_genus_zero
    )
    res = integrate_stratified(integrand, cfg, n, workers=workers)
    lam = cfg.lambdas()
    terms = {g: lam[g] * r.estimate for g, r in res.components.items()}
    C = max((abs(r.estimate) for r in res.components.values()), default=0.0)
    G = cfg.truncation_genus
    tail = C * math.exp(-2 * alpha * G) / (1 - math.exp(-2 * alpha))
    return PartitionResult(res.estimate, res.stderr, tail, terms, res.n_samples, res.seed)


__all__ = [
    "DEFAULT_SEED",
    "StratifiedMeasureConfig",
    "MCResult",
    "WeightedSample",
    "TorusMapSpec",
    "PartitionResult",
    "sample_fundamental_domain",
    "integrate_stratum",
    "stratum_volume",
    "integrate_stratified",
    "dirichlet_energy_torus",
    "partition_function",
    "NAMED_INTEGRANDS",
]
