"""The direct limit of Siegel spaces and the strata of its completion.

``h_g`` sits inside ``h_{g+1}`` by padding ``X`` with a zero row and column
and ``Y`` with a unit diagonal entry (the trailing torus has period ``i``).
A point of the limit is stored by its minimal-genus representative.
Boundary components are reached along rays on which a set of diagonal
directions of ``Y`` diverges; the limit is the retained diagonal block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Union

import numpy as np

from .errors import GenusMismatch, NotStandardPosition, SiegelError
from .siegel import SiegelPoint, cross_ratio_eigenvalues, make_siegel_point, siegel_distance

PADDING_TOL = 1e-9
DIVERGENCE_RATIO = 1e8
COUPLING_TOL = 1e-6


def embed_point(Z: SiegelPoint, target_genus: int) -> SiegelPoint:
    g = Z.genus
    if target_genus < g:
        raise GenusMismatch(f"cannot embed genus {g} into genus {target_genus}")
    X = np.zeros((target_genus, target_genus))
    Y = np.eye(target_genus)
    X[:g, :g] = Z.X
    Y[:g, :g] = Z.Y
    return make_siegel_point(X, Y)


@dataclass(frozen=True, eq=False)
class UniversalPoint:
    """Canonical (minimal genus) representative of a point of ``h_inf``."""

    genus: int
    point: SiegelPoint

    def __post_init__(self):
        if self.point.genus != self.genus:
            raise GenusMismatch(f"point has genus {self.point.genus}, expected {self.genus}")
        if self.genus > 1 and _trailing_is_padding(self.point, PADDING_TOL):
            raise SiegelError("not canonical: trailing block matches the padding pattern")

    def at_genus(self, g: int) -> SiegelPoint:
        return embed_point(self.point, g)

    def isclose(self, other: "UniversalPoint", atol: float = 1e-9) -> bool:
        g = max(self.genus, other.genus)
        return self.at_genus(g).isclose(other.at_genus(g), atol)


def _trailing_is_padding(Z: SiegelPoint, tol: float) -> bool:
    k = Z.genus - 1
    e = np.zeros(Z.genus)
    e[k] = 1.0
    return bool(np.max(np.abs(Z.X[k])) <= tol and np.max(np.abs(Z.Y[k] - e)) <= tol)


def stabilize(Z: SiegelPoint, *, tol: float = PADDING_TOL) -> UniversalPoint:
    """Strip trailing padding blocks; never goes below genus one."""
    g = Z.genus
    X, Y = np.array(Z.X), np.array(Z.Y)
    while g > 1 and _trailing_is_padding(make_siegel_point(X[:g, :g], Y[:g, :g]), tol):
        g -= 1
    if g == Z.genus:
        return UniversalPoint(g, Z)
    return UniversalPoint(g, make_siegel_point(X[:g, :g], Y[:g, :g]))


def universal_distance(U1: UniversalPoint, U2: UniversalPoint) -> float:
    g = max(U1.genus, U2.genus)
    return siegel_distance(U1.at_genus(g), U2.at_genus(g))


def padding_eigenvalues(Z1: SiegelPoint, Z2: SiegelPoint, extra: int) -> np.ndarray:
    """Cross-ratio eigenvalues of the pair embedded ``extra`` genera higher."""
    g = Z1.genus + extra
    return cross_ratio_eigenvalues(embed_point(Z1, g), embed_point(Z2, g))


# ---------------------------------------------------------------------------
# Strata


@dataclass(frozen=True)
class StratumDescriptor:
    """``interior`` with a single genus, or ``boundary`` with a genus multiset.

    The empty boundary multiset is the cusp ``A_0``.
    """

    kind: Literal["interior", "boundary"]
    genera: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "genera", tuple(sorted(self.genera, reverse=True)))
        if self.kind == "interior":
            if len(self.genera) != 1 or self.genera[0] < 1:
                raise ValueError("an interior stratum has exactly one genus >= 1")
        elif self.kind == "boundary":
            if any(x < 1 for x in self.genera):
                raise ValueError("boundary genera must be >= 1 (empty for the cusp)")
        else:
            raise ValueError(f"unknown stratum kind {self.kind!r}")

    @classmethod
    def interior(cls, g: int) -> "StratumDescriptor":
        return cls("interior", (g,))

    @classmethod
    def boundary(cls, genera: Iterable[int] = ()) -> "StratumDescriptor":
        return cls("boundary", tuple(genera))

    @property
    def is_cusp(self) -> bool:
        return self.kind == "boundary" and not self.genera

    def to_json(self) -> dict:
        return {"kind": self.kind, "genera": list(self.genera)}

    @classmethod
    def from_json(cls, data: dict) -> "StratumDescriptor":
        return cls(data["kind"], tuple(int(x) for x in data["genera"]))


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """Result of a boundary projection: the stratum and its point (``None`` at the cusp)."""

    descriptor: StratumDescriptor
    point: SiegelPoint | None


def detect_divergent(Z: SiegelPoint, *, ratio: float = DIVERGENCE_RATIO) -> tuple[int, ...]:
    """Diagonal directions of ``Y`` exceeding ``ratio`` times the median of the rest.

    Directions are taken largest first; the median is recomputed over the
    directions that remain after each removal.
    """
    d = np.diag(Z.Y)
    order = list(np.argsort(d)[::-1])
    divergent: list[int] = []
    while len(order) > 1:
        top, rest = order[0], order[1:]
        if d[top] > ratio * float(np.median(d[rest])):
            divergent.append(int(top))
            order = rest
        else:
            break
    return tuple(sorted(divergent))


def boundary_project(
    Z: SiegelPoint,
    retain: Iterable[int] | None = None,
    *,
    coupling_tol: float | None = COUPLING_TOL,
) -> BoundaryPoint:
    """Limit of ``Z + i t P`` as ``t -> inf``, ``P`` the projector on the dropped directions.

    ``retain`` lists the (0-based) diagonal indices that stay finite; when
    omitted the divergent directions are detected with :func:`detect_divergent`.
    The limit is the retained block of ``Z`` in the standard boundary
    component.  With ``coupling_tol`` set, the point must already be in
    standard position: entries of ``Z`` coupling retained and dropped
    directions may not exceed it.  Passing ``None`` takes the Satake limit
    along the ray regardless of bounded coupling.
    """
    g = Z.genus
    if retain is None:
        dropped = set(detect_divergent(Z))
        keep = [i for i in range(g) if i not in dropped]
    else:
        keep = sorted(set(int(i) for i in retain))
    if any(i < 0 or i >= g for i in keep):
        raise GenusMismatch(f"retained indices {keep} out of range for genus {g}")
    if len(keep) == g:
        return BoundaryPoint(StratumDescriptor.interior(g), Z)
    drop = [i for i in range(g) if i not in keep]
    if coupling_tol is not None and keep:
        coupling = float(np.max(np.abs(Z.Z[np.ix_(keep, drop)])))
        if coupling > coupling_tol:
            raise NotStandardPosition(
                f"coupling {coupling:.3e} between retained and divergent blocks exceeds {coupling_tol:g}"
            )
    if not keep:
        return BoundaryPoint(StratumDescriptor.boundary(()), None)
    block = make_siegel_point(Z.X[np.ix_(keep, keep)], Z.Y[np.ix_(keep, keep)])
    return BoundaryPoint(StratumDescriptor.boundary((len(keep),)), block)


Classifiable = Union[UniversalPoint, BoundaryPoint, StratumDescriptor]


def classify_stratum(candidate: Classifiable) -> StratumDescriptor:
    if isinstance(candidate, StratumDescriptor):
        return candidate
    if isinstance(candidate, UniversalPoint):
        return StratumDescriptor.interior(candidate.genus)
    if isinstance(candidate, BoundaryPoint):
        return candidate.descriptor
    descriptor = getattr(candidate, "descriptor", None)
    if isinstance(descriptor, StratumDescriptor):
        return descriptor
    raise TypeError(f"cannot classify {type(candidate).__name__}")
