"""Reduction to fundamental domains.

Minkowski reduction of positive definite forms under ``GL(n, Z)`` and the
classical Siegel reduction for ``Sp(2g, Z)`` acting on the Siegel upper half
space: alternate (i) Minkowski reduction of ``Y``, (ii) integer translation
of ``X`` into ``[-1/2, 1/2]`` and (iii) the dilation step, applying the
element of a fixed finite set that minimises ``|det(CZ + D)|`` while that
minimum is below one.

For genus 2 the finite set contains Gottschling's nineteen conditions (plus
one redundant one), which cut out the exact fundamental domain.  For genus 3
the set is a finite, non-exhaustive family of embedded genus 1 and 2
conditions and full-rank inversions; membership there is best effort.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import IterationLimitExceeded, NotPositiveDefinite, Unsupported
from .siegel import (
    SiegelPoint,
    SymplecticElement,
    _action_matrix,
    basis_change,
    check_positive_definite,
    identity,
    make_siegel_point,
    make_symplectic,
    siegel_distance,
    symmetrize,
    translation,
)

BOUNDARY_TOL = 1e-9
MAX_ITER = 10000
_EXACT_MINKOWSKI_ORDER = 4


@dataclass(frozen=True, eq=False)
class ReductionResult:
    """Reduced representative together with the integral witness transform.

    For Minkowski reduction ``reduced`` is a matrix and ``transform`` the
    unimodular ``U`` with ``reduced = U Y U^T``.  For Siegel reduction
    ``reduced`` is a :class:`SiegelPoint` and ``transform`` a symplectic
    element with ``sp_action(transform, Z) == reduced``.
    """

    reduced: object
    transform: object
    word_length: int
    approximate: bool = False


# ---------------------------------------------------------------------------
# Minkowski reduction


@lru_cache(maxsize=None)
def _short_vectors(n: int, bound: int) -> np.ndarray:
    vecs = []
    for v in itertools.product(range(-bound, bound + 1), repeat=n):
        if any(v) and np.gcd.reduce(np.abs(v)) == 1:
            # one of each +-v pair: first non-zero entry positive
            first = next(x for x in v if x)
            if first > 0:
                vecs.append(v)
    return np.array(vecs, dtype=np.int64)


def _tail_gcd_one(vecs: np.ndarray, k: int) -> np.ndarray:
    tail = np.abs(vecs[:, k:])
    return np.gcd.reduce(tail, axis=1) == 1


def _sort_and_size_reduce(Y: np.ndarray, U: np.ndarray) -> tuple[np.ndarray, int]:
    """Pairwise (Lagrange) size reduction with re-sorting until stable."""
    n = Y.shape[0]
    steps = 0
    for _ in range(MAX_ITER):
        A = U @ Y @ U.T
        order = np.argsort(np.diag(A), kind="stable")
        if not np.array_equal(order, np.arange(n)):
            U = U[order]
            steps += 1
            A = U @ Y @ U.T
        changed = False
        for i in range(n):
            for j in range(i + 1, n):
                r = np.rint(A[i, j] / A[i, i])
                if r != 0:
                    U[j] -= int(r) * U[i]
                    A = U @ Y @ U.T
                    steps += 1
                    changed = True
        if not changed:
            return U, steps
    raise IterationLimitExceeded("size reduction did not stabilise")


def _normalize_signs(Y: np.ndarray, U: np.ndarray) -> np.ndarray:
    n = Y.shape[0]
    for k in range(n - 1):
        A = U @ Y @ U.T
        if A[k, k + 1] < 0:
            U[k + 1] = -U[k + 1]
    return U


def minkowski_reduce(Y, *, rtol: float = 1e-12) -> ReductionResult:
    """Minkowski-reduce a positive definite matrix.

    The result satisfies ``a_11 <= a_22 <= ...``, ``a_k,k+1 >= 0`` and for
    every ``k`` the Minkowski minimality condition
    ``a_kk <= v^T A v`` over integer ``v`` with ``gcd(v_k, ..., v_n) = 1``.
    Orders up to four are searched exactly (coefficients in ``[-2, 2]``
    contain the finite condition set for these orders); larger orders fall
    back to size reduction with pairwise swaps and are flagged approximate.
    """
    Y, _ = symmetrize(Y)
    check_positive_definite(Y)
    n = Y.shape[0]
    U = np.eye(n, dtype=np.int64)
    U, steps = _sort_and_size_reduce(Y, U)
    approximate = n > _EXACT_MINKOWSKI_ORDER
    if not approximate:
        vecs = _short_vectors(n, 2)
        for _ in range(MAX_ITER):
            A = U @ Y @ U.T
            improved = False
            for k in range(n):
                cand = vecs[_tail_gcd_one(vecs, k)]
                q = np.einsum("vi,ij,vj->v", cand, A, cand)
                best = int(np.argmin(q))
                if q[best] < A[k, k] * (1 - rtol):
                    v = cand[best]
                    m = k + int(np.flatnonzero(np.abs(v[k:]) == 1)[0])
                    T = np.eye(n, dtype=np.int64)
                    T[m] = v
                    T[[k, m]] = T[[m, k]]
                    U = T @ U
                    steps += 1
                    improved = True
                    break
            if not improved:
                break
            U, s = _sort_and_size_reduce(Y, U)
            steps += s
        else:
            raise IterationLimitExceeded("Minkowski reduction did not terminate")
    U = _normalize_signs(Y, U)
    reduced, _ = symmetrize(U @ Y @ U.T)
    return ReductionResult(reduced, U, steps, approximate)


def is_minkowski_reduced(Y, *, tol: float = BOUNDARY_TOL) -> bool:
    Y = np.asarray(Y, dtype=float)
    n = Y.shape[0]
    if n > _EXACT_MINKOWSKI_ORDER:
        raise Unsupported("exact Minkowski test only for order <= 4")
    scale = max(1.0, float(np.max(np.abs(Y))))
    d = np.diag(Y)
    if np.any(np.diff(d) < -tol * scale):
        return False
    if any(Y[k, k + 1] < -tol * scale for k in range(n - 1)):
        return False
    vecs = _short_vectors(n, 1)
    q = np.einsum("vi,ij,vj->v", vecs, Y, vecs)
    for k in range(n):
        mask = _tail_gcd_one(vecs, k)
        if np.any(q[mask] < d[k] - tol * scale):
            return False
    return True


# ---------------------------------------------------------------------------
# Dilation sets


def _quasi_inversion(g: int, i: int, shift: int = 0) -> SymplecticElement:
    """Inversion ``z_ii -> -1/(z_ii + shift)`` in one coordinate direction."""
    A = np.eye(g)
    D = np.eye(g)
    B = np.zeros((g, g))
    C = np.zeros((g, g))
    A[i, i] = 0
    B[i, i] = -1
    C[i, i] = 1
    D[i, i] = shift
    return make_symplectic(A, B, C, D)


def _full_inversion(S) -> SymplecticElement:
    """``Z -> -(Z + S)^-1``; its denominator determinant is ``det(Z + S)``."""
    S = np.asarray(S, dtype=float)
    g = S.shape[0]
    return make_symplectic(np.zeros((g, g)), -np.eye(g), np.eye(g), S)


def _embed_on(M: SymplecticElement, idx: tuple[int, ...], g: int) -> SymplecticElement:
    blocks = []
    for blk, diag in ((M.A, 1.0), (M.B, 0.0), (M.C, 0.0), (M.D, 1.0)):
        out = np.eye(g) * diag
        out[np.ix_(idx, idx)] = blk
        blocks.append(out)
    return make_symplectic(*blocks)


@lru_cache(maxsize=None)
def dilation_elements(g: int) -> tuple[SymplecticElement, ...]:
    if g == 1:
        return (_quasi_inversion(1, 0),)
    if g == 2:
        els = [_quasi_inversion(2, 0), _quasi_inversion(2, 1)]
        U = basis_change([[1, -1], [0, 1]])
        for e in (-1, 0, 1):
            # |z11 + z22 - 2 z12 + e| >= 1
            els.append(_quasi_inversion(2, 0, e) @ U)
        shifts = [np.zeros((2, 2))]
        for e in (1, -1):
            shifts += [
                [[e, 0], [0, 0]],
                [[0, 0], [0, e]],
                [[e, 0], [0, e]],
                [[e, 0], [0, -e]],
                [[e, e], [e, 0]],
                [[0, e], [e, e]],
                [[0, e], [e, 0]],
            ]
        els += [_full_inversion(S) for S in shifts]
        return tuple(els)
    if g == 3:
        els = []
        for pair in itertools.combinations(range(3), 2):
            els += [_embed_on(M, pair, 3) for M in dilation_elements(2)]
        for entries in itertools.product((-1, 0, 1), repeat=6):
            S = np.zeros((3, 3))
            S[np.triu_indices(3)] = entries
            S = S + np.triu(S, 1).T
            els.append(_full_inversion(S))
        return tuple(els)
    raise Unsupported(f"no dilation set for genus {g}")


@lru_cache(maxsize=None)
def _dilation_blocks(g: int) -> tuple[np.ndarray, np.ndarray]:
    els = dilation_elements(g)
    return np.array([M.C for M in els]), np.array([M.D for M in els])


def dilation_determinants(Z: np.ndarray) -> np.ndarray:
    """``|det(CZ + D)|`` over the dilation set.

    ``Z`` may be a single ``g x g`` matrix or a batch ``(n, g, g)``; the
    result has shape ``(n_elements,)`` or ``(n, n_elements)``.
    """
    Z = np.asarray(Z, dtype=complex)
    g = Z.shape[-1]
    C, D = _dilation_blocks(g)
    M = np.einsum("kij,...jl->...kil", C, Z) + D
    return np.abs(np.linalg.det(M))


# ---------------------------------------------------------------------------
# Siegel reduction


def _canonicalize_genus_one(Z: np.ndarray, M: SymplecticElement, words: int, tol: float):
    """Tie-break on the boundary: x in (-1/2, 1/2], x >= 0 on the unit arc."""
    z = Z[0, 0]
    if abs(z.real + 0.5) <= tol:
        T = translation([[1.0]])
        Z, M, words = Z + 1, T @ M, words + 1
        z = Z[0, 0]
    if abs(abs(z) - 1) <= tol and z.real < -tol:
        S = _quasi_inversion(1, 0)
        Z, M, words = _action_matrix(S, Z), S @ M, words + 1
    return Z, M, words


def siegel_reduce(Z: SiegelPoint, *, max_iter: int = MAX_ITER, tol: float = 1e-12) -> ReductionResult:
    g = Z.genus
    if g > 3:
        raise Unsupported(f"Siegel reduction is implemented for genus <= 3, got {g}")
    C, D = _dilation_blocks(g)
    els = dilation_elements(g)
    W = Z.Z.copy()
    M = identity(g)
    words = 0
    for _ in range(max_iter):
        mink = minkowski_reduce(W.imag)
        U = mink.transform
        if not np.array_equal(U, np.eye(g, dtype=np.int64)):
            W = U @ W @ U.T
            M = basis_change(U) @ M
            words += 1
        shift = np.rint(W.real)
        if np.any(shift != 0):
            W = W - shift
            M = translation(-shift) @ M
            words += 1
        dets = dilation_determinants(W)
        k = int(np.argmin(dets))
        if dets[k] < 1 - tol:
            W = _action_matrix(els[k], W)
            W = (W + W.T) / 2
            M = els[k] @ M
            words += 1
            continue
        break
    else:
        raise IterationLimitExceeded(f"no fixed point after {max_iter} iterations")
    if g == 1:
        W, M, words = _canonicalize_genus_one(W, M, words, BOUNDARY_TOL)
    try:
        reduced = make_siegel_point(W.real, W.imag)
    except NotPositiveDefinite as exc:  # pragma: no cover - would be a bug
        raise IterationLimitExceeded(f"reduction lost positivity: {exc}") from exc
    return ReductionResult(reduced, M, words)


def in_fundamental_domain(Z: SiegelPoint, *, tol: float = BOUNDARY_TOL) -> bool:
    g = Z.genus
    if g > 3:
        raise Unsupported(f"membership test is implemented for genus <= 3, got {g}")
    if np.any(np.abs(Z.X) > 0.5 + tol):
        return False
    if g > 1 and not is_minkowski_reduced(Z.Y, tol=tol):
        return False
    return bool(np.all(dilation_determinants(Z.Z) >= 1 - tol))


def fundamental_domain_mask(Zs: np.ndarray, *, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Vectorised membership for a batch ``(n, g, g)`` of genus 1 or 2 points."""
    Zs = np.asarray(Zs, dtype=complex)
    g = Zs.shape[-1]
    if g > 2:
        raise Unsupported("batched membership is implemented for genus <= 2")
    ok = np.all(np.abs(Zs.real) <= 0.5 + tol, axis=(1, 2))
    if g == 2:
        Y = Zs.imag
        y11, y12, y22 = Y[:, 0, 0], Y[:, 0, 1], Y[:, 1, 1]
        scale = np.maximum(1.0, y22)
        ok &= (y11 <= y22 + tol * scale) & (y12 >= -tol * scale) & (2 * y12 <= y11 + tol * scale)
    ok &= np.all(dilation_determinants(Zs) >= 1 - tol, axis=1)
    return ok


def wall_images(Z: SiegelPoint) -> list[SiegelPoint]:
    """Images of a reduced point under elements fixing the domain's walls.

    Points on or near a wall of the fundamental domain have nearby
    equivalent representatives on the other side; together with ``Z`` itself
    these are the candidates for the distance in the quotient.
    """
    g = Z.genus
    out = [Z]
    moves = list(dilation_elements(g))
    for S in itertools.product((-1, 0, 1), repeat=g * (g + 1) // 2):
        if any(S):
            T = np.zeros((g, g))
            T[np.triu_indices(g)] = S
            moves.append(translation(T + np.triu(T, 1).T))
    if g >= 2:
        for perm in itertools.permutations(range(g)):
            for signs in itertools.product((1, -1), repeat=g):
                U = np.diag(signs)[list(perm)]
                moves.append(basis_change(U))
    for M in moves:
        try:
            W = _action_matrix(M, Z.Z)
            out.append(make_siegel_point(W.real, W.imag))
        except Exception:  # singular denominators are simply skipped
            continue
    return out


def quotient_distance(Z1: SiegelPoint, Z2: SiegelPoint) -> float:
    """Distance between the ``Sp(2g, Z)`` orbits, robust for wall-adjacent points.

    Both points are reduced; the minimum over the wall images of the second
    representative is returned.  This is exact whenever the true minimiser
    is one of these finitely many images, which holds for points of the
    fundamental domain that are close to each other.
    """
    a = siegel_reduce(Z1).reduced
    b = siegel_reduce(Z2).reduced
    return min(siegel_distance(a, w) for w in wall_images(b))


__all__ = [
    "ReductionResult",
    "minkowski_reduce",
    "is_minkowski_reduced",
    "siegel_reduce",
    "in_fundamental_domain",
    "fundamental_domain_mask",
    "dilation_elements",
    "dilation_determinants",
    "wall_images",
    "quotient_distance",
]
