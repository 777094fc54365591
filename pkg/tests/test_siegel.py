import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from siegel_moduli.errors import (
    GenusMismatch,
    NotPositiveDefinite,
    NotSymmetric,
    NotSymplectic,
    OrderMismatch,
    SingularDenominator,
)
from siegel_moduli.siegel import (
    SiegelPoint,
    _action_matrix,
    base_point,
    cross_ratio_eigenvalues,
    identity,
    make_siegel_point,
    make_symplectic,
    siegel_distance,
    sp_action,
    sp_embed,
    standard_J,
)
from siegel_moduli.universal import embed_point

from conftest import random_point, random_word


def hyperbolic(z, w):
    return math.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))


def cross_ratio_direct(Z1, Z2):
    """Eigenvalues of R(Z1, Z2) straight from the defining product."""
    A, B = Z1.Z, Z2.Z
    R = (A - B) @ np.linalg.inv(A - B.conj()) @ (A.conj() - B.conj()) @ np.linalg.inv(A.conj() - B)
    return np.sort(np.linalg.eigvals(R).real)


def distance_direct(Z1, Z2):
    rho = np.clip(cross_ratio_direct(Z1, Z2), 0, None)
    s = np.sqrt(rho)
    return math.sqrt(float(np.sum(np.log((1 + s) / (1 - s)) ** 2)))


def test_base_point():
    Z = make_siegel_point(np.zeros((2, 2)), np.eye(2))
    assert Z.genus == 2
    assert np.array_equal(Z.Z, 1j * np.eye(2))
    assert base_point(2).isclose(Z)


def test_one_by_one_point():
    Z = make_siegel_point([[0.3]], [[0.4]])
    assert Z.Z[0, 0] == 0.3 + 0.4j


def test_not_positive_definite():
    with pytest.raises(NotPositiveDefinite):
        make_siegel_point(np.zeros((2, 2)), [[1, 2], [2, 1]])


def test_order_mismatch():
    with pytest.raises(OrderMismatch):
        make_siegel_point(np.zeros((2, 2)), np.eye(3))


def test_symmetrization_recorded_and_bounded():
    Y = np.array([[1.0, 0.2 + 4e-9], [0.2, 1.0]])
    Z = make_siegel_point(np.zeros((2, 2)), Y)
    assert np.array_equal(Z.Y, Z.Y.T)
    assert Z.correction == pytest.approx(2e-9, rel=1e-3)
    with pytest.raises(NotSymmetric):
        make_siegel_point(np.zeros((2, 2)), [[1.0, 0.3], [0.2, 1.0]])


def test_relative_positivity():
    with pytest.raises(NotPositiveDefinite):
        make_siegel_point(np.zeros((2, 2)), np.diag([1.0, 1e-14]))


def test_symplectic_examples():
    I, O = np.eye(2), np.zeros((2, 2))
    assert make_symplectic(I, O, O, I).is_identity()
    J = make_symplectic(O, I, -I, O)
    assert J.integral
    with pytest.raises(NotSymplectic):
        make_symplectic(I, O, [[1, 0], [1, 1]], I)


def test_symplectic_real_tolerance():
    c, s = math.cos(0.3), math.sin(0.3)
    M = make_symplectic([[c]], [[s]], [[-s]], [[c]])
    assert not M.integral
    with pytest.raises(NotSymplectic):
        make_symplectic([[c]], [[s]], [[-s]], [[c + 1e-6]])


def test_action_examples():
    Z = make_siegel_point([[0.0]], [[0.5]])
    W = sp_action(make_symplectic([[0]], [[-1]], [[1]], [[0]]), Z)
    assert W.Z[0, 0] == pytest.approx(2j, abs=1e-14)
    assert sp_action(identity(1), Z).isclose(Z, 0)


def test_unitary_stabilizer(rng):
    # A + iB unitary: (A, B; -B, A) fixes i I
    for g in (1, 2, 3):
        H = rng.normal(size=(g, g)) + 1j * rng.normal(size=(g, g))
        Q, _ = np.linalg.qr(H)
        M = make_symplectic(Q.real, Q.imag, -Q.imag, Q.real)
        assert sp_action(M, base_point(g)).isclose(base_point(g), 1e-12)


def test_action_errors():
    with pytest.raises(GenusMismatch):
        sp_action(identity(2), base_point(1))
    # C Z + D vanishes at the real boundary point Z = 0
    with pytest.raises(SingularDenominator):
        _action_matrix(standard_J(2), np.zeros((2, 2), dtype=complex))


def test_log_two():
    d = siegel_distance(make_siegel_point([[0]], [[1]]), make_siegel_point([[0]], [[2]]))
    assert abs(d - math.log(2)) < 1e-12


def test_genus_one_matches_hyperbolic(rng):
    for _ in range(500):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.05, 5))
        w = complex(rng.uniform(-3, 3), rng.uniform(0.05, 5))
        d = siegel_distance(SiegelPoint.from_complex(z), SiegelPoint.from_complex(w))
        assert abs(d - hyperbolic(z, w)) < 1e-10 * max(1, d)


def test_matches_direct_cross_ratio(rng):
    for g in (2, 3):
        for _ in range(50):
            Z1, Z2 = random_point(rng, g), random_point(rng, g)
            rho = cross_ratio_eigenvalues(Z1, Z2)
            assert np.all(rho >= 0) and np.all(rho < 1)
            assert np.allclose(rho, cross_ratio_direct(Z1, Z2), atol=1e-9)
            assert siegel_distance(Z1, Z2) == pytest.approx(distance_direct(Z1, Z2), rel=1e-7)


def test_diagonal_points_are_products(rng):
    z = rng.uniform(0.2, 2, 3) * 1j + rng.uniform(-1, 1, 3)
    w = rng.uniform(0.2, 2, 3) * 1j + rng.uniform(-1, 1, 3)
    d = siegel_distance(SiegelPoint.from_complex(np.diag(z)), SiegelPoint.from_complex(np.diag(w)))
    expected = math.sqrt(sum(hyperbolic(a, b) ** 2 for a, b in zip(z, w)))
    assert d == pytest.approx(expected, rel=1e-10)


def test_metric_axioms(rng):
    for g in (1, 2, 3):
        for _ in range(30):
            a, b, c = (random_point(rng, g) for _ in range(3))
            assert siegel_distance(a, a) < 1e-7
            assert siegel_distance(a, b) == pytest.approx(siegel_distance(b, a), rel=1e-9, abs=1e-12)
            assert siegel_distance(a, c) <= siegel_distance(a, b) + siegel_distance(b, c) + 1e-9


def test_invariance_under_words(rng):
    for g in (1, 2, 3):
        for _ in range(30):
            Z1, Z2 = random_point(rng, g, 0.5), random_point(rng, g, 0.5)
            M = random_word(rng, g, 8)
            d0 = siegel_distance(Z1, Z2)
            d1 = siegel_distance(sp_action(M, Z1), sp_action(M, Z2))
            assert abs(d1 - d0) < 1e-8 * max(1, d0)


def test_action_composition(rng):
    for g in (1, 2, 3):
        for _ in range(20):
            Z = random_point(rng, g, 0.5)
            M1, M2 = random_word(rng, g, 4), random_word(rng, g, 4)
            a = sp_action(M1 @ M2, Z)
            b = sp_action(M1, sp_action(M2, Z))
            assert np.max(np.abs(a.Z - b.Z)) < 1e-9 * max(1, np.max(np.abs(a.Z)))


def test_inverse(rng):
    for g in (1, 2, 3):
        M = random_word(rng, g, 6)
        assert (M @ M.inverse()).is_identity(up_to_sign=False)


def test_sp_embed():
    assert sp_embed(identity(2), 3).is_identity(up_to_sign=False)
    S = sp_embed(make_symplectic([[0]], [[-1]], [[1]], [[0]]), 2)
    expected = np.array([[0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]])
    assert np.array_equal(S.matrix, expected)
    assert S.integral
    with pytest.raises(GenusMismatch):
        sp_embed(identity(3), 2)


def test_sp_embed_equivariance(rng):
    for g in (1, 2):
        Z = random_point(rng, g, 0.5)
        M = random_word(rng, g, 5)
        a = sp_action(sp_embed(M, g + 1), embed_point(Z, g + 1))
        b = embed_point(sp_action(M, Z), g + 1)
        assert np.max(np.abs(a.Z - b.Z)) < 1e-10 * max(1, np.max(np.abs(a.Z)))


def test_standard_j_is_symplectic():
    for g in (1, 2, 3):
        J = standard_J(g)
        assert (J @ J).is_identity(up_to_sign=True)


@settings(max_examples=60, deadline=None)
@given(
    x1=st.floats(-5, 5), y1=st.floats(1e-3, 1e3),
    x2=st.floats(-5, 5), y2=st.floats(1e-3, 1e3),
)
def test_property_upper_half_plane(x1, y1, x2, y2):
    z, w = complex(x1, y1), complex(x2, y2)
    d = siegel_distance(SiegelPoint.from_complex(z), SiegelPoint.from_complex(w))
    assert d >= 0
    assert d == pytest.approx(hyperbolic(z, w), rel=1e-8, abs=1e-7)
