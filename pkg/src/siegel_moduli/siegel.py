"""Siegel upper half spaces, symplectic matrices and the invariant distance.

A point of the Siegel upper half space of degree ``g`` is a complex symmetric
matrix ``Z = X + iY`` with ``Y`` positive definite.  The real symplectic
group acts by ``Z -> (AZ + B)(CZ + D)^-1``.  The invariant metric used
throughout is ``ds^2 = tr(Y^-1 dZ Y^-1 dZbar)``, whose restriction to
degree one is the Poincare metric ``|dz|^2 / y^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConsistencyError,
    GenusMismatch,
    NotPositiveDefinite,
    NotSymmetric,
    NotSymplectic,
    OrderMismatch,
    SingularDenominator,
)

SYMMETRY_ATOL = 1e-8
POSITIVITY_RTOL = 1e-12
SYMPLECTIC_ATOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def symmetrize(M, *, atol: float = SYMMETRY_ATOL) -> tuple[np.ndarray, float]:
    """Return ``((M + M^T)/2, correction)`` for a real square matrix.

    ``correction`` is the largest entry of ``|M - M^T| / 2``.  Corrections
    above ``atol * max(1, |M|_max)`` are rejected rather than repaired.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise OrderMismatch(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NotSymmetric("matrix has non-finite entries")
    correction = float(np.max(np.abs(M - M.T))) / 2
    scale = max(1.0, float(np.max(np.abs(M))))
    if correction > atol * scale:
        raise NotSymmetric(f"asymmetry {correction:.3e} exceeds tolerance")
    return (M + M.T) / 2, correction


def check_positive_definite(Y: np.ndarray, *, rtol: float = POSITIVITY_RTOL) -> None:
    w = np.linalg.eigvalsh(Y)
    if not (w[0] > 0 and w[0] > rtol * w[-1]):
        raise NotPositiveDefinite(f"eigenvalues {w.tolist()} are not all positive")


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    """Validated point ``X + iY``; use :func:`make_siegel_point` to build one."""

    X: np.ndarray
    Y: np.ndarray
    correction: float = field(default=0.0)

    @property
    def genus(self) -> int:
        return self.X.shape[0]

    @property
    def Z(self) -> np.ndarray:
        return self.X + 1j * self.Y

    @classmethod
    def from_complex(cls, Z) -> "SiegelPoint":
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        return make_siegel_point(Z.real, Z.imag)

    def isclose(self, other: "SiegelPoint", atol: float = 1e-9) -> bool:
        return self.genus == other.genus and bool(np.max(np.abs(self.Z - other.Z)) <= atol)

    def __repr__(self) -> str:
        return f"SiegelPoint(genus={self.genus}, Z={np.array2string(self.Z, precision=6)})"


def make_siegel_point(X, Y) -> SiegelPoint:
    Xs, cx = symmetrize(X)
    Ys, cy = symmetrize(Y)
    if Xs.shape != Ys.shape:
        raise OrderMismatch(f"X has order {Xs.shape[0]}, Y has order {Ys.shape[0]}")
    check_positive_definite(Ys)
    return SiegelPoint(_frozen(Xs), _frozen(Ys), max(cx, cy))


def base_point(g: int) -> SiegelPoint:
    """The point ``i I_g``."""
    return make_siegel_point(np.zeros((g, g)), np.eye(g))


@dataclass(frozen=True, eq=False)
class SymplecticElement:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    integral: bool

    @property
    def genus(self) -> int:
        return self.A.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])

    @classmethod
    def from_matrix(cls, M) -> "SymplecticElement":
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
            raise OrderMismatch(f"expected a 2g x 2g matrix, got shape {M.shape}")
        g = M.shape[0] // 2
        return make_symplectic(M[:g, :g], M[:g, g:], M[g:, :g], M[g:, g:])

    def __matmul__(self, other: "SymplecticElement") -> "SymplecticElement":
        if self.genus != other.genus:
            raise GenusMismatch(f"cannot compose genus {self.genus} with genus {other.genus}")
        return SymplecticElement.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "SymplecticElement":
        return make_symplectic(self.D.T, -self.B.T, -self.C.T, self.A.T)

    def is_identity(self, up_to_sign: bool = True) -> bool:
        I = np.eye(2 * self.genus)
        M = self.matrix
        if np.array_equal(M, I):
            return True
        return up_to_sign and np.array_equal(M, -I)

    def __repr__(self) -> str:
        return f"SymplecticElement(genus={self.genus}, integral={self.integral})"


def symplectic_residual(A, B, C, D) -> float:
    g = A.shape[0]
    r1 = A.T @ C - C.T @ A
    r2 = B.T @ D - D.T @ B
    r3 = A.T @ D - C.T @ B - np.eye(g)
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2)), np.max(np.abs(r3))))


def make_symplectic(A, B, C, D) -> SymplecticElement:
    blocks = [np.atleast_2d(np.asarray(b, dtype=float)) for b in (A, B, C, D)]
    g = blocks[0].shape[0]
    if any(b.shape != (g, g) for b in blocks):
        raise OrderMismatch("the four blocks must be g x g matrices of equal order")
    integral = all(np.array_equal(b, np.round(b)) for b in blocks)
    if integral:
        # exact check in integer arithmetic
        Ai, Bi, Ci, Di = (b.astype(np.int64) for b in blocks)
        ok = (
            np.array_equal(Ai.T @ Ci, Ci.T @ Ai)
            and np.array_equal(Bi.T @ Di, Di.T @ Bi)
            and np.array_equal(Ai.T @ Di - Ci.T @ Bi, np.eye(g, dtype=np.int64))
        )
        if not ok:
            res = symplectic_residual(*blocks)
            raise NotSymplectic(f"integral matrix violates the symplectic relations (residual {res:g})")
    else:
        res = symplectic_residual(*blocks)
        if res > SYMPLECTIC_ATOL:
            raise NotSymplectic(f"symplectic relation residual {res:.3e} exceeds tolerance")
    return SymplecticElement(*(_frozen(b.copy()) for b in blocks), integral=integral)


def identity(g: int) -> SymplecticElement:
    I, O = np.eye(g), np.zeros((g, g))
    return make_symplectic(I, O, O, I)


def standard_J(g: int) -> SymplecticElement:
    I, O = np.eye(g), np.zeros((g, g))
    return make_symplectic(O, I, -I, O)


def translation(S) -> SymplecticElement:
    """``Z -> Z + S`` for a symmetric ``S``."""
    S = np.atleast_2d(np.asarray(S, dtype=float))
    g = S.shape[0]
    return make_symplectic(np.eye(g), S, np.zeros((g, g)), np.eye(g))


def basis_change(U) -> SymplecticElement:
    """``Z -> U Z U^T`` for an invertible ``U``."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    g = U.shape[0]
    Uinv_T = np.linalg.inv(U).T
    if np.allclose(Uinv_T, np.round(Uinv_T), atol=1e-9):
        Uinv_T = np.round(Uinv_T)
    return make_symplectic(U, np.zeros((g, g)), np.zeros((g, g)), Uinv_T)


def _action_matrix(M: SymplecticElement, Z: np.ndarray) -> np.ndarray:
    num = M.A @ Z + M.B
    den = M.C @ Z + M.D
    if np.linalg.cond(den) > 1e12:
        raise SingularDenominator("CZ + D is numerically singular")
    # (num den^-1)^T = den^-T num^T
    W = np.linalg.solve(den.T, num.T).T
    return W


def sp_action(M: SymplecticElement, Z: SiegelPoint) -> SiegelPoint:
    if M.genus != Z.genus:
        raise GenusMismatch(f"element of genus {M.genus} cannot act on a point of genus {Z.genus}")
    W = _action_matrix(M, Z.Z)
    return make_siegel_point(W.real, W.imag)


def sp_embed(M: SymplecticElement, target_genus: int) -> SymplecticElement:
    """Pad ``(A, B; C, D)`` with identity blocks on A, D and zeros on B, C."""
    g = M.genus
    if target_genus < g:
        raise GenusMismatch(f"cannot embed genus {g} into genus {target_genus}")
    A = np.eye(target_genus)
    D = np.eye(target_genus)
    B = np.zeros((target_genus, target_genus))
    C = np.zeros((target_genus, target_genus))
    A[:g, :g], B[:g, :g], C[:g, :g], D[:g, :g] = M.A, M.B, M.C, M.D
    return make_symplectic(A, B, C, D)


def _inv_sqrt_spd(Y: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(Y)
    return (V / np.sqrt(w)) @ V.T


def cayley_matrix(Z1: SiegelPoint, Z2: SiegelPoint) -> np.ndarray:
    """Cayley image of ``Z1`` after moving ``Z2`` to ``i I`` by a real affine map.

    The result ``K`` is complex symmetric with operator norm below one, and the
    cross-ratio matrix ``R(Z1, Z2)`` is similar to the Hermitian ``K K^H``.
    """
    S = _inv_sqrt_spd(Z2.Y)
    W = S @ (Z1.Z - Z2.X) @ S
    I = np.eye(Z1.genus)
    K = np.linalg.solve((W + 1j * I).T, (W - 1j * I).T).T
    asym = float(np.max(np.abs(K - K.T)))
    if asym > 1e-9:
        raise ConsistencyError(f"Cayley image not symmetric (residual {asym:.3e})")
    return (K + K.T) / 2


def cross_ratio_eigenvalues(Z1: SiegelPoint, Z2: SiegelPoint) -> np.ndarray:
    """Eigenvalues of ``R = (Z1-Z2)(Z1-Z2bar)^-1 (Z1bar-Z2bar)(Z1bar-Z2)^-1``, ascending."""
    if Z1.genus != Z2.genus:
        raise GenusMismatch(f"points have genus {Z1.genus} and {Z2.genus}")
    sv = np.linalg.svd(cayley_matrix(Z1, Z2), compute_uv=False)
    return np.sort(sv**2)


def siegel_distance(Z1: SiegelPoint, Z2: SiegelPoint) -> float:
    if Z1.genus != Z2.genus:
        raise GenusMismatch(f"points have genus {Z1.genus} and {Z2.genus}")
    r = np.linalg.svd(cayley_matrix(Z1, Z2), compute_uv=False)
    if np.any(r >= 1.0):
        raise ConsistencyError(f"cross-ratio eigenvalues {(r**2).tolist()} not below 1")
    # log((1 + sqrt(rho)) / (1 - sqrt(rho))) = 2 artanh(sqrt(rho))
    return float(np.sqrt(np.sum((2 * np.arctanh(r)) ** 2)))
