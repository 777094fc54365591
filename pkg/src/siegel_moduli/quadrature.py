"""Quadrature rules shared by the period and Bergman computations."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import QuadratureNonConvergence


@lru_cache(maxsize=32)
def chebyshev_angles(n: int) -> np.ndarray:
    """Gauss-Chebyshev (first kind) nodes as angles in ``(0, pi)``."""
    theta = (np.arange(n) + 0.5) * np.pi / n
    theta.setflags(write=False)
    return theta


def chebyshev_nodes(a, b, n: int) -> np.ndarray:
    """Nodes ``x_k`` with ``int_a^b f(x) dx / sqrt((x-a)(b-x)) ~ pi/n sum f(x_k)``.

    ``a`` and ``b`` may be complex; the nodes then lie on the segment.
    """
    return (a + b) / 2 + (b - a) / 2 * np.cos(chebyshev_angles(n))


def until_converged(
    compute: Callable[[int], np.ndarray],
    *,
    n0: int = 64,
    n_max: int = 1 << 17,
    rtol: float = 1e-13,
    accept: float = 1e-8,
) -> tuple[np.ndarray, int, float]:
    """Double the node count until successive results agree.

    Stops once the change is below ``rtol`` (relative to the largest entry)
    or ``n_max`` is reached; raises if the last change exceeds ``accept``.
    Returns ``(value, nodes, last_change)``.
    """
    prev = np.asarray(compute(n0))
    n = n0
    change = np.inf
    while n < n_max:
        n *= 2
        cur = np.asarray(compute(n))
        scale = max(1.0, float(np.max(np.abs(cur))))
        change = float(np.max(np.abs(cur - prev))) / scale
        prev = cur
        if change < rtol:
            break
    if change > accept:
        raise QuadratureNonConvergence(f"change {change:.2e} at {n} nodes exceeds {accept:g}")
    return prev, n, change


def _polar_rule(n_r: int, n_theta: int):
    s, ws = leggauss(n_r)
    s = (s + 1) / 2
    ws = ws / 2
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    return s, ws, theta, 2 * np.pi / n_theta


def plane_integral(
    F: Callable[[np.ndarray], np.ndarray],
    centers,
    *,
    n_r: int = 200,
    n_theta: int = 256,
    power: int = 6,
) -> complex | np.ndarray:
    """Integrate ``F`` over the complex plane with respect to area.

    ``F`` may have ``1/|x - c|`` singularities at the ``centers`` and must
    decay at least like ``|x|^-3``.  The plane is split by the partition of
    unity ``|x - c_j|^-power / sum_k |x - c_k|^-power``; each piece is
    integrated in polar coordinates around its centre (which absorbs the
    singularity) with radius ``r = R s / (1 - s)`` mapped onto ``[0, 1]``.
    ``F`` maps an ``(n_r, n_theta)`` array of points to values of shape
    ``(n_r, n_theta, ...)``; trailing axes are integrated independently.
    """
    centers = np.asarray(centers, dtype=complex)
    s, ws, theta, wt = _polar_rule(n_r, n_theta)
    ring = np.exp(1j * theta)
    total = 0j
    for c in centers:
        gaps = np.abs(centers - c)
        gaps = gaps[gaps > 0]
        R = float(gaps.min()) if gaps.size else 1.0
        r = R * s / (1 - s)
        jac = R / (1 - s) ** 2
        x = c + r[:, None] * ring[None, :]
        dist = np.abs(x[..., None] - centers)
        # weight of the own centre, written to avoid dividing by zero at x = c
        rel = (dist[..., :] / np.abs(x - c)[..., None]) ** (-power)
        phi = 1.0 / np.sum(rel, axis=-1)
        weight = phi * (r * jac * ws)[:, None] * wt
        total = total + np.tensordot(weight, F(x), axes=([0, 1], [0, 1]))
    return total


def plane_integral_converged(
    F: Callable[[np.ndarray], np.ndarray],
    centers,
    *,
    rtol: float = 1e-10,
    start: tuple[int, int] = (100, 128),
    max_doublings: int = 3,
    accept: float = 1e-7,
) -> complex | np.ndarray:
    """:func:`plane_integral` with grid doubling until the relative change is below ``rtol``."""
    n_r, n_t = start
    prev = plane_integral(F, centers, n_r=n_r, n_theta=n_t)
    change = np.inf
    for _ in range(max_doublings):
        n_r, n_t = 2 * n_r, 2 * n_t
        cur = plane_integral(F, centers, n_r=n_r, n_theta=n_t)
        scale = max(float(np.max(np.abs(cur))), 1e-300)
        change = float(np.max(np.abs(cur - prev))) / scale
        prev = cur
        if change <= rtol:
            return cur
    if change > accept:
        raise QuadratureNonConvergence(f"plane integral relative change {change:.2e}")
    return prev
