"""Period matrices of hyperelliptic curves, the Torelli map and Bergman quantities.

Curves are ``y^2 = prod_j (x - e_j)`` over the finite branch points ``e_j``;
with an odd number of them ``x = inf`` is a branch point as well.

Homology basis (real branch points ``e_1 < ... < e_n``).  The polynomial is
negative on the *cuts* ``[e_1, e_2], [e_3, e_4], ...`` and positive on the
*gaps* ``[e_2, e_3], [e_4, e_5], ...``.  The branch of ``y`` on the upper
bank of the real axis is ``sqrt|p(x)| * i^m`` with ``m`` the number of
branch points to the right of ``x`` (the product of principal square roots
of ``x - e_j``, continuous in the upper half plane); on the lower bank it
flips sign across cuts and agrees across gaps.

* ``a_k`` encircles cut ``k`` (``k = 1..g``); its period is twice the
  upper-bank integral over the cut.
* ``b_k`` leaves cut ``k`` on the first sheet, runs through the gaps up to
  the last cut and returns on the second sheet; its period is twice the sum
  of the gap integrals ``k..g``.

With this basis ``a_j . b_k = delta_jk`` and the normalised period matrix
``Z = A^-1 B`` has positive definite imaginary part; all signs follow from
the sheet convention above.

Genus one curves with non-real branch points are also accepted: the two
cycles encircle the segments ``[e_a, e_b]`` and ``[e_b, e_c]``, which meet
once at ``e_b``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    GenusMismatch,
    InvalidCurve,
    QueryTooCloseToBranchPoint,
    RiemannRelationViolation,
    Unsupported,
)
from .quadrature import chebyshev_nodes, plane_integral_converged, until_converged
from .reduction import siegel_reduce
from .siegel import SiegelPoint, make_siegel_point
from .universal import StratumDescriptor, UniversalPoint, stabilize

SYMMETRY_TOL = 1e-8
QUERY_MIN_DISTANCE = 1e-6


@dataclass(frozen=True)
class HyperellipticCurve:
    branch_points: tuple
    label: str | None = None

    def __post_init__(self):
        pts = np.asarray(self.branch_points, dtype=complex).ravel()
        if pts.size < 3:
            raise InvalidCurve("a curve of genus >= 1 needs at least 3 finite branch points")
        if not np.all(np.isfinite(pts)):
            raise InvalidCurve("branch points must be finite")
        real = bool(np.all(pts.imag == 0))
        if real:
            pts = np.sort(pts.real)
        spread = float(np.max(np.abs(pts[:, None] - pts[None, :])))
        gaps = np.abs(pts[:, None] - pts[None, :])
        np.fill_diagonal(gaps, np.inf)
        if float(gaps.min()) <= 1e-10 * spread:
            raise InvalidCurve("branch points must be pairwise distinct")
        genus = (pts.size + 1) // 2 - 1
        if not real and genus != 1:
            raise Unsupported("non-real branch points are supported in genus 1 only")
        object.__setattr__(self, "branch_points", tuple(pts.tolist()))

    @property
    def genus(self) -> int:
        return (len(self.branch_points) + 1) // 2 - 1

    @property
    def is_real(self) -> bool:
        return all(isinstance(e, float) for e in self.branch_points)

    @property
    def branched_at_infinity(self) -> bool:
        return len(self.branch_points) % 2 == 1

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.branch_points, dtype=float if self.is_real else complex)

    def poly(self, x) -> np.ndarray:
        x = np.asarray(x)
        return np.prod(x[..., None] - self.points, axis=-1)

    def shifted(self, c: float) -> "HyperellipticCurve":
        return HyperellipticCurve(tuple(np.asarray(self.points) + c), self.label)

    def scaled(self, s: float) -> "HyperellipticCurve":
        return HyperellipticCurve(tuple(np.asarray(self.points) * s), self.label)


# ---------------------------------------------------------------------------
# Periods


def _basis_frame(e: np.ndarray) -> tuple[float, float]:
    c = float(np.mean(e))
    s = float(np.max(np.abs(e - c))) or 1.0
    return c, s


def _real_interval_integrals(e: np.ndarray, g: int, n: int) -> np.ndarray:
    """Upper-bank integrals of ``u^k dx / y`` over consecutive branch intervals.

    ``u = (x - c)/s`` is a centred, scaled coordinate; the resulting period
    matrix is independent of this change of basis.  Shape ``(len(e)-1, g)``.
    """
    c, s = _basis_frame(e)
    out = np.empty((e.size - 1, g), dtype=complex)
    for i in range(e.size - 1):
        a, b = e[i], e[i + 1]
        x = chebyshev_nodes(a, b, n)
        others = np.delete(e, [i, i + 1])
        h = np.sqrt(np.abs(np.prod(x[:, None] - others[None, :], axis=1)))
        # sqrt((x-a)(b-x)) is absorbed by the Chebyshev weight
        m = e.size - 1 - i  # branch points strictly right of the interval interior
        f = 1.0 / (h * (1j) ** m)
        u = (x - c) / s
        powers = u[:, None] ** np.arange(g)[None, :]
        out[i] = np.pi / n * (f @ powers)
    return out


def _real_periods(e: np.ndarray, g: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    iv = _real_interval_integrals(e, g, n)
    A = np.stack([2 * iv[2 * k] for k in range(g)], axis=1)
    B = np.stack([2 * iv[2 * k + 1 : 2 * g : 2].sum(axis=0) for k in range(g)], axis=1)
    return A, B


def _segment_integral(a: complex, b: complex, others: np.ndarray, n: int) -> complex:
    """``int dx / y`` along the straight segment from ``b`` to ``a``."""
    x = chebyshev_nodes(a, b, n)
    root = np.ones(n, dtype=complex)
    mid = (a + b) / 2
    for e in others:
        # rotate so the segment stays off the branch cut of the principal root
        u = (mid - e) / abs(mid - e)
        root *= np.sqrt((x - e) / u) * np.sqrt(u)
    return complex(1j * np.pi / n * np.sum(1.0 / root))


def _segment_clearance(e: np.ndarray, order: tuple[int, int, int]) -> float:
    worst = np.inf
    for i, j in ((order[0], order[1]), (order[1], order[2])):
        a, b = e[i], e[j]
        for k in range(e.size):
            if k in (i, j):
                continue
            t = np.clip(((e[k] - a) * np.conj(b - a)).real / abs(b - a) ** 2, 0, 1)
            worst = min(worst, abs(e[k] - (a + t * (b - a))) / abs(b - a))
    return worst


def _complex_genus_one_periods(e: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = max(itertools.permutations(range(e.size), 3), key=lambda o: _segment_clearance(e, o))
    a, b, c = (e[i] for i in order)
    w1 = 2 * _segment_integral(a, b, np.delete(e, [order[0], order[1]]), n)
    w2 = 2 * _segment_integral(b, c, np.delete(e, [order[1], order[2]]), n)
    if (w2 / w1).imag < 0:
        w2 = -w2
    return np.array([[w1]]), np.array([[w2]])


def raw_periods(curve: HyperellipticCurve, *, return_nodes: bool = False):
    """Period matrices ``(A, B)`` of the holomorphic basis.

    For real curves the basis is ``((x - c)/s)^k dx / y`` with ``c, s`` the
    centre and half-spread of the branch points (so in genus one it is
    ``dx / y`` itself); columns index the cycles.
    """
    g = curve.genus
    e = curve.points
    if curve.is_real:
        def compute(n):
            A, B = _real_periods(e, g, n)
            return np.concatenate([A, B], axis=1)
    else:
        def compute(n):
            A, B = _complex_genus_one_periods(e, n)
            return np.concatenate([A, B], axis=1)
    AB, nodes, _ = until_converged(compute)
    A, B = AB[:, :g], AB[:, g:]
    if return_nodes:
        return A, B, nodes
    return A, B


def check_riemann_relations(Z: np.ndarray) -> None:
    asym = float(np.max(np.abs(Z - Z.T)))
    if asym > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(Z)))):
        raise RiemannRelationViolation(f"period matrix not symmetric (residual {asym:.3e})")
    w = np.linalg.eigvalsh((Z.imag + Z.imag.T) / 2)
    if w[0] <= 0:
        raise RiemannRelationViolation(f"imaginary part not positive definite (eigenvalues {w.tolist()})")


def period_matrix(curve: HyperellipticCurve) -> SiegelPoint:
    """Normalised period matrix ``A^-1 B`` (not reduced)."""
    A, B = raw_periods(curve)
    Z = np.linalg.solve(A, B)
    check_riemann_relations(Z)
    return make_siegel_point(Z.real, Z.imag)


def reduced_period(curve: HyperellipticCurve) -> SiegelPoint:
    return siegel_reduce(period_matrix(curve)).reduced


# ---------------------------------------------------------------------------
# Torelli map


@dataclass(frozen=True, eq=False)
class TaggedPoint:
    """A period point of a disjoint union of curves, with the stratum it represents."""

    descriptor: StratumDescriptor
    point: SiegelPoint


def _block_diagonal(points: Sequence[SiegelPoint]) -> SiegelPoint:
    g = sum(p.genus for p in points)
    X = np.zeros((g, g))
    Y = np.zeros((g, g))
    k = 0
    for p in points:
        X[k : k + p.genus, k : k + p.genus] = p.X
        Y[k : k + p.genus, k : k + p.genus] = p.Y
        k += p.genus
    return make_siegel_point(X, Y)


def torelli_embed(curves, *, as_boundary: bool = True):
    """Period point of a curve (``UniversalPoint``) or of a disjoint union.

    A list of curves maps to the block-diagonal matrix of their reduced
    period points; the tag is ``Boundary({g_1, ..., g_k})`` when the union
    is read as a degenerate curve and ``Interior({sum g_i})`` when it is read
    as a product abelian variety.
    """
    if isinstance(curves, HyperellipticCurve):
        return stabilize(reduced_period(curves))
    curves = list(curves)
    if len(curves) == 1:
        return torelli_embed(curves[0])
    blocks = [reduced_period(c) for c in curves]
    point = _block_diagonal(blocks)
    genera = [c.genus for c in curves]
    if as_boundary:
        desc = StratumDescriptor.boundary(genera)
    else:
        desc = StratumDescriptor.interior(sum(genera))
    return TaggedPoint(desc, point)


def torelli_point(curve: HyperellipticCurve) -> UniversalPoint:
    return torelli_embed(curve)


# ---------------------------------------------------------------------------
# Bergman metric


@dataclass(frozen=True)
class QuadDifferential:
    """Holomorphic quadratic differential.

    Genus 1: ``c dz^2`` in the flat coordinate with periods ``1, tau``.
    Genus 2: ``(c0 + c1 x + c2 x^2) dx^2 / y^2``.
    """

    genus: int
    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in np.atleast_1d(self.coefficients))
        expected = {1: 1, 2: 3}.get(self.genus)
        if expected is None:
            raise Unsupported(f"quadratic differentials implemented for genus 1 and 2, not {self.genus}")
        if len(coeffs) != expected:
            raise ValueError(f"genus {self.genus} needs {expected} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coefficients", coeffs)


@dataclass(frozen=True, eq=False)
class BergmanReport:
    """Bergman density at a point of the x-chart, with the raw Gram matrix.

    ``gram_matrix[i, j] = (i/2) int theta_i ^ conj(theta_j)`` for
    ``theta_i = x^i dx / y``.  In genus one ``z_chart_density`` is the
    density in the flat coordinate ``z`` with periods ``1, tau``.
    """

    density_value: float
    gram_matrix: np.ndarray
    x_query: complex
    z_chart_density: float | None = None


def _one_form_values(curve: HyperellipticCurve, x: np.ndarray) -> np.ndarray:
    """Monomials ``x^i`` (``i < g``) stacked on a new last axis."""
    g = curve.genus
    return x[..., None] ** np.arange(g)


def gram_matrix(curve: HyperellipticCurve, *, rtol: float = 1e-10) -> np.ndarray:
    """Raw Gram matrix of ``x^i dx / y`` by area quadrature over both sheets."""
    g = curve.genus

    def F(x):
        v = _one_form_values(curve, x)
        outer = v[..., :, None] * np.conj(v[..., None, :])
        return outer / np.abs(curve.poly(x))[..., None, None]

    G = 2 * plane_integral_converged(F, curve.points, rtol=rtol)
    G = (G + G.conj().T) / 2
    np.linalg.cholesky(G)  # raises if not positive definite
    return G


def _density_x(curve: HyperellipticCurve, G_inv: np.ndarray, x: np.ndarray) -> np.ndarray:
    v = _one_form_values(curve, x)
    quad = np.einsum("...i,ij,...j->...", np.conj(v), G_inv, v).real
    return quad / np.abs(curve.poly(x))


def bergman_density(curve: HyperellipticCurve, x_query, *, G: np.ndarray | None = None) -> BergmanReport:
    x_query = complex(x_query)
    dist = float(np.min(np.abs(np.asarray(curve.points) - x_query)))
    if dist <= QUERY_MIN_DISTANCE:
        raise QueryTooCloseToBranchPoint(f"query point is {dist:.2e} from a branch point")
    if G is None:
        G = gram_matrix(curve)
    G_inv = np.linalg.inv(G)
    rho = float(_density_x(curve, G_inv, np.asarray(x_query)))
    z_density = None
    if curve.genus == 1:
        A, _ = raw_periods(curve)
        # dz/dx = 1/(A y):  rho_z = rho_x / |dz/dx|^2
        z_density = rho * abs(A[0, 0]) ** 2 * abs(complex(curve.poly(np.asarray(x_query))))
    return BergmanReport(rho, G, x_query, z_density)


def bergman_total_mass(curve: HyperellipticCurve, *, G: np.ndarray | None = None) -> float:
    """``int rho_B`` over the surface; equals the genus for an exact Gram matrix."""
    if G is None:
        G = gram_matrix(curve)
    G_inv = np.linalg.inv(G)
    total = 2 * plane_integral_converged(lambda x: _density_x(curve, G_inv, x), curve.points)
    return float(np.real(total))


def _qd_x_chart(curve: HyperellipticCurve, w: QuadDifferential, x: np.ndarray, A: complex | None):
    """Coefficient of ``dx^2`` of the quadratic differential at ``x``."""
    if w.genus == 1:
        return w.coefficients[0] / (A**2 * curve.poly(x))
    c0, c1, c2 = w.coefficients
    return (c0 + c1 * x + c2 * x**2) / curve.poly(x)


def bergman_qd_product(
    curve: HyperellipticCurve,
    w1: QuadDifferential,
    w2: QuadDifferential,
    *,
    G: np.ndarray | None = None,
) -> complex:
    """``(w1, w2)_B = (i/2) int w1 conj(w2) / rho_B dz ^ dzbar`` over the surface.

    ``(i/2) dz ^ dzbar`` is the area element, so the product is real and
    positive on the diagonal.
    """
    g = curve.genus
    if w1.genus != g or w2.genus != g:
        raise GenusMismatch(f"differentials of genus {w1.genus}, {w2.genus} on a genus {g} curve")
    if g > 2:
        raise Unsupported("quadratic differential products implemented for genus <= 2")
    if G is None:
        G = gram_matrix(curve)
    G_inv = np.linalg.inv(G)
    A = raw_periods(curve)[0][0, 0] if g == 1 else None

    def F(x):
        q1 = _qd_x_chart(curve, w1, x, A)
        q2 = _qd_x_chart(curve, w2, x, A)
        return q1 * np.conj(q2) / _density_x(curve, G_inv, x)

    return complex(2 * plane_integral_converged(F, curve.points))
