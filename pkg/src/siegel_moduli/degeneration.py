"""Degenerating families of genus-2 hyperelliptic curves and boundary strata.

Pinching is modelled by colliding branch points.

* Separating: two odd clusters (each a curve branched at infinity) are
  pulled apart, ``cluster_k + c_k / eps``.  The loop surrounding one
  cluster bounds, the period matrix tends to ``diag(tau_1, tau_2)`` and the
  limit stays in the interior of ``A_2``.
* Non-separating: two adjacent branch points ``c -+ eps`` collide.  The
  vanishing cycle is the ``a``-cycle around them, its dual period
  ``Z_22 ~ (i / pi) log(1 / eps)`` diverges and the retained block tends
  to the period of the curve with the double point removed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import Inconclusive, InvalidCurve, InvalidFamily, Unsupported
from .jacobian import HyperellipticCurve, TaggedPoint, reduced_period, torelli_embed
from .reduction import quotient_distance, siegel_reduce
from .siegel import SiegelPoint
from .universal import BoundaryPoint, StratumDescriptor, boundary_project

MIN_EPSILON = 1e-12
FINITE_STEP = 0.05
DIVERGENT_SLOPE = 0.3

SEPARATING_CLUSTERS = ((-1.0, 0.0, 1.0), (-1.0, 0.0, 1.0))
SEPARATING_CENTERS = (-2.0, 2.0)
NONSEPARATING_FIXED = (-1.0, 0.0, 1.0, 2.0)
NONSEPARATING_PINCH = 3.0

Kind = Literal["separating", "nonseparating"]
_KIND_ALIASES = {
    "separating": "separating",
    "sep": "separating",
    "nonseparating": "nonseparating",
    "nonsep": "nonseparating",
    "non-separating": "nonseparating",
}


@dataclass(frozen=True, eq=False)
class DegenerationFamily:
    """A one-parameter family of curves indexed by a decreasing ``eps`` grid.

    ``clusters``/``centers`` describe a separating layout; ``fixed`` and
    ``pinch`` a non-separating one (the pair ``pinch -+ eps`` collides).
    """

    kind: Kind
    epsilons: tuple[float, ...]
    clusters: tuple[tuple[float, ...], ...] = ()
    centers: tuple[float, ...] = ()
    fixed: tuple[float, ...] = ()
    pinch: float = 0.0

    def curve(self, eps: float) -> HyperellipticCurve:
        if self.kind == "separating":
            pts = [c / eps + x for c, cl in zip(self.centers, self.clusters) for x in cl]
        else:
            pts = list(self.fixed) + [self.pinch - eps, self.pinch + eps]
        return HyperellipticCurve(tuple(pts), label=f"{self.kind} eps={eps:g}")

    def curves(self) -> list[HyperellipticCurve]:
        return [self.curve(e) for e in self.epsilons]

    @property
    def genus(self) -> int:
        return self.curve(self.epsilons[0]).genus

    def limit_curves(self) -> list[HyperellipticCurve]:
        """Components of the limiting curve (normalisation of the nodal curve)."""
        if self.kind == "separating":
            return [HyperellipticCurve(tuple(cl), label="cluster") for cl in self.clusters]
        return [HyperellipticCurve(tuple(self.fixed), label="unpinched")]


def _check_epsilons(epsilons) -> tuple[float, ...]:
    eps = np.asarray(epsilons, dtype=float).ravel()
    if eps.size == 0:
        raise InvalidFamily("need at least one epsilon")
    if not np.all(np.isfinite(eps)) or np.any(eps <= MIN_EPSILON):
        raise InvalidFamily(f"epsilons must be finite and > {MIN_EPSILON:g}")
    if np.any(np.diff(eps) >= 0):
        raise InvalidFamily("epsilons must be strictly decreasing")
    return tuple(float(e) for e in eps)


def make_family(
    kind: str,
    epsilons: Sequence[float],
    *,
    clusters: Sequence[Sequence[float]] | None = None,
    centers: Sequence[float] | None = None,
    fixed: Sequence[float] | None = None,
    pinch: float | None = None,
) -> DegenerationFamily:
    """Build a separating or non-separating family of total genus <= 2.

    Defaults: separating clusters ``{-1, 0, 1}`` centred at ``-+2 / eps``
    (the layout ``[-3, -2, -1, 1, 2, 3]`` pulled apart); non-separating
    ``[-1, 0, 1, 2, 3 - eps, 3 + eps]``.
    """
    try:
        kind = _KIND_ALIASES[str(kind).lower()]
    except KeyError:
        raise InvalidFamily(f"unknown family kind {kind!r}") from None
    eps = _check_epsilons(epsilons)
    if kind == "separating":
        cl = tuple(tuple(float(x) for x in c) for c in (clusters or SEPARATING_CLUSTERS))
        ce = tuple(float(c) for c in (centers or SEPARATING_CENTERS))
        if len(cl) < 2 or len(cl) != len(ce):
            raise InvalidFamily("a separating layout needs >= 2 clusters, one centre each")
        if any(len(c) % 2 == 0 or len(c) < 3 for c in cl):
            raise InvalidFamily("each cluster needs an odd number (>= 3) of branch points")
        if len(set(ce)) != len(ce):
            raise InvalidFamily("cluster centres must be distinct")
        fam = DegenerationFamily(kind, eps, clusters=cl, centers=ce)
    else:
        fx = tuple(float(x) for x in (fixed if fixed is not None else NONSEPARATING_FIXED))
        pc = float(NONSEPARATING_PINCH if pinch is None else pinch)
        if len(fx) < 3:
            raise InvalidFamily("the unpinched curve needs >= 3 branch points")
        if min(abs(x - pc) for x in fx) <= eps[0]:
            raise InvalidFamily("the colliding pair must stay clear of the fixed branch points")
        fam = DegenerationFamily(kind, eps, fixed=fx, pinch=pc)
    total = sum(c.genus for c in fam.limit_curves()) if kind == "separating" else fam.genus
    if total > 2:
        raise Unsupported(f"families of total genus {total} > 2 are not supported")
    # construction validity for every member
    try:
        fam.curves()
    except InvalidCurve as exc:
        raise InvalidFamily(f"layout produces an invalid curve: {exc}") from exc
    return fam


# ---------------------------------------------------------------------------
# Probe


@dataclass(frozen=True, eq=False)
class DegenerationReport:
    epsilons: tuple[float, ...]
    reduced_points: list[SiegelPoint]
    offdiag_norms: list[float]
    im_diag_max: list[float]
    distance_to_first: list[float]
    classification: Literal["Finite", "Divergent"] | None = None
    trend: dict = field(default_factory=dict)


def _offdiag_norm(Z: SiegelPoint) -> float:
    g = Z.genus
    if g == 1:
        return 0.0
    off = Z.Z[~np.eye(g, dtype=bool)]
    return float(np.max(np.abs(off)))


def _per_decade(values: np.ndarray, eps: np.ndarray) -> np.ndarray:
    decades = np.diff(-np.log10(eps))
    return np.diff(values) / decades


def classify_trend(epsilons, im_diag_max, distance_to_first) -> tuple[str, dict]:
    """``Finite``, ``Divergent`` or raise :class:`Inconclusive`.

    Finite: over the last step both the distance and the largest imaginary
    diagonal entry move by less than ``FINITE_STEP`` per decade of ``eps``.
    Divergent: the distance increases strictly at every step and a least
    squares fit of the largest imaginary diagonal entry against
    ``log10(1 / eps)`` has slope at least ``DIVERGENT_SLOPE``.
    """
    eps = np.asarray(epsilons, dtype=float)
    d = np.asarray(distance_to_first, dtype=float)
    h = np.asarray(im_diag_max, dtype=float)
    if eps.size < 3:
        raise Inconclusive("at least three epsilons are needed to read a trend")
    dd = _per_decade(d, eps)
    dh = _per_decade(h, eps)
    slope = float(np.polyfit(-np.log10(eps), h, 1)[0])
    trend = {
        "distance_step_per_decade": float(dd[-1]),
        "im_diag_step_per_decade": float(dh[-1]),
        "im_diag_slope_per_decade": slope,
    }
    if abs(dd[-1]) < FINITE_STEP and abs(dh[-1]) < FINITE_STEP:
        return "Finite", trend
    if np.all(np.diff(d) > 0) and slope >= DIVERGENT_SLOPE:
        return "Divergent", trend
    raise Inconclusive(
        f"trend is neither bounded nor divergent (last distance step {dd[-1]:.3g}/decade, "
        f"slope {slope:.3g}/decade)"
    )


def neck_limit_probe(family: DegenerationFamily, *, workers: int | None = None, classify: bool = True):
    """Reduced period points along the family and the Finite/Divergent verdict.

    The per-``eps`` computations run concurrently when ``workers > 1``;
    results are assembled in ``eps`` order.  When the trend is inconclusive
    the raised :class:`Inconclusive` carries the unclassified report as
    ``exc.report``.
    """
    curves = family.curves()
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(reduced_period, curves))
    else:
        points = [reduced_period(c) for c in curves]
    first = points[0]
    dist = [0.0] + [quotient_distance(p, first) for p in points[1:]]
    report = DegenerationReport(
        epsilons=family.epsilons,
        reduced_points=points,
        offdiag_norms=[_offdiag_norm(p) for p in points],
        im_diag_max=[float(np.max(np.diag(p.Y))) for p in points],
        distance_to_first=dist,
    )
    if not classify:
        return report
    try:
        label, trend = classify_trend(report.epsilons, report.im_diag_max, report.distance_to_first)
    except Inconclusive as exc:
        exc.report = report
        raise
    return DegenerationReport(
        report.epsilons,
        report.reduced_points,
        report.offdiag_norms,
        report.im_diag_max,
        report.distance_to_first,
        label,
        trend,
    )


def expected_limit(family: DegenerationFamily) -> TaggedPoint | SiegelPoint:
    """Period data of the limit: block diagonal for separating, genus 1 block otherwise."""
    if family.kind == "separating":
        return torelli_embed(family.limit_curves())
    return reduced_period(family.limit_curves()[0])


def project_to_boundary(Z: SiegelPoint) -> BoundaryPoint:
    """Drop the direction with the largest imaginary diagonal entry.

    The Satake limit along the ray is taken (bounded coupling to the dropped
    direction is ignored) and the retained block is reduced.
    """
    g = Z.genus
    drop = int(np.argmax(np.diag(Z.Y)))
    keep = [i for i in range(g) if i != drop]
    bp = boundary_project(Z, keep, coupling_tol=None)
    if bp.point is None:
        return bp
    return BoundaryPoint(bp.descriptor, siegel_reduce(bp.point).reduced)


# ---------------------------------------------------------------------------
# Strata


def _partitions(n: int, largest: int | None = None):
    """Partitions of ``n`` as non-increasing tuples."""
    if n == 0:
        yield ()
        return
    largest = n if largest is None else largest
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def enumerate_boundary_strata(g: int, include_interior: bool = False) -> list[StratumDescriptor]:
    """Boundary strata of the compactified moduli space of genus ``g`` curves.

    Multisets ``{g_1, ..., g_k}`` with all ``g_i >= 1`` and either
    ``sum < g`` or ``sum = g`` with ``k >= 2``, followed by the cusp ``{}``.
    Ordered by number of parts, then lexicographically; the interior
    ``{g}`` comes first when requested.
    """
    if g < 1:
        raise InvalidFamily(f"genus must be >= 1, got {g}")
    found = set()
    for n in range(1, g + 1):
        for p in _partitions(n):
            if n < g or len(p) >= 2:
                found.add(p)
    ordered = sorted(found, key=lambda p: (len(p), tuple(reversed(p)), p))
    out = [StratumDescriptor.interior(g)] if include_interior else []
    out += [StratumDescriptor.boundary(p) for p in ordered]
    out.append(StratumDescriptor.boundary(()))
    return out


__all__ = [
    "DegenerationFamily",
    "DegenerationReport",
    "make_family",
    "neck_limit_probe",
    "classify_trend",
    "expected_limit",
    "project_to_boundary",
    "enumerate_boundary_strata",
]
