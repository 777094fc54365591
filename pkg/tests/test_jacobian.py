import math

import numpy as np
import pytest
from scipy.special import ellipk

from siegel_moduli.errors import GenusMismatch, InvalidCurve, QueryTooCloseToBranchPoint, Unsupported
from siegel_moduli.jacobian import (
    HyperellipticCurve,
    QuadDifferential,
    _basis_frame,
    _real_periods,
    bergman_density,
    bergman_qd_product,
    bergman_total_mass,
    check_riemann_relations,
    gram_matrix,
    period_matrix,
    raw_periods,
    reduced_period,
    torelli_embed,
)
from siegel_moduli.reduction import quotient_distance, siegel_reduce
from siegel_moduli.siegel import SiegelPoint
from siegel_moduli.universal import StratumDescriptor, UniversalPoint

RHO = complex(0.5, math.sqrt(3) / 2)


def tau_elliptic_oracle(e1, e2, e3):
    """Reduced tau of y^2 = (x-e1)(x-e2)(x-e3) from complete elliptic integrals."""
    m = (e2 - e1) / (e3 - e1)
    tau = 1j * ellipk(1 - m) / ellipk(m)
    return siegel_reduce(SiegelPoint.from_complex(tau)).reduced.Z[0, 0]


def j_from_tau(tau, terms=60):
    q = np.exp(2j * np.pi * tau)
    n = np.arange(1, terms)
    s3 = np.array([sum(d**3 for d in range(1, k + 1) if k % d == 0) for k in n])
    s5 = np.array([sum(d**5 for d in range(1, k + 1) if k % d == 0) for k in n])
    E4 = 1 + 240 * np.sum(s3 * q**n)
    E6 = 1 - 504 * np.sum(s5 * q**n)
    return 1728 * E4**3 / (E4**3 - E6**2)


def j_from_branch_points(e1, e2, e3):
    lam = (e3 - e1) / (e2 - e1)
    return 256 * (lam**2 - lam + 1) ** 3 / (lam**2 * (lam - 1) ** 2)


def test_curve_validation():
    with pytest.raises(InvalidCurve):
        HyperellipticCurve((0.0, 1.0))
    with pytest.raises(InvalidCurve):
        HyperellipticCurve((0.0, 1.0, 1.0, 2.0))
    with pytest.raises(Unsupported):
        HyperellipticCurve((0, 1, 2, 3, 4j))
    c = HyperellipticCurve((3, -1, 0, 1))
    assert c.branch_points == (-1.0, 0.0, 1.0, 3.0)
    assert c.genus == 1 and not c.branched_at_infinity
    assert HyperellipticCurve((-1, 0, 1)).branched_at_infinity


def test_lemniscatic():
    tau = reduced_period(HyperellipticCurve((-1.0, 0.0, 1.0))).Z[0, 0]
    assert abs(tau - 1j) < 1e-6
    assert abs(tau - tau_elliptic_oracle(-1, 0, 1)) < 1e-12


def test_equianharmonic():
    roots = np.exp(2j * np.pi * np.arange(3) / 3)
    tau = reduced_period(HyperellipticCurve(tuple(roots))).Z[0, 0]
    assert abs(tau - RHO) < 1e-6


def test_genus_one_real_against_elliptic_integrals(rng):
    for _ in range(20):
        e = np.sort(rng.normal(size=3) * 3)
        tau = reduced_period(HyperellipticCurve(tuple(e))).Z[0, 0]
        assert abs(tau - tau_elliptic_oracle(*e)) < 1e-9


def test_genus_one_complex_against_j_invariant(rng):
    for _ in range(15):
        e = rng.normal(size=3) + 1j * rng.normal(size=3)
        tau = reduced_period(HyperellipticCurve(tuple(e))).Z[0, 0]
        j1, j2 = j_from_tau(tau), j_from_branch_points(*e)
        assert abs(j1 - j2) < 1e-7 * max(1, abs(j2))


def test_four_finite_points_match_three_plus_infinity(rng):
    # x -> 1 / (x - e4) sends e4 to infinity
    for _ in range(10):
        e = np.sort(rng.normal(size=4))
        tau4 = reduced_period(HyperellipticCurve(tuple(e))).Z[0, 0]
        img = 1 / (e[:3] - e[3])
        tau3 = reduced_period(HyperellipticCurve(tuple(img))).Z[0, 0]
        assert abs(tau4 - tau3) < 1e-9


def test_riemann_relations_random_genus_two(rng):
    for _ in range(50):
        e = np.sort(rng.normal(size=6) * rng.uniform(0.1, 10))
        Z = period_matrix(HyperellipticCurve(tuple(e)))
        assert np.max(np.abs(Z.Z - Z.Z.T)) <= 1e-8
        assert np.linalg.eigvalsh(Z.Y)[0] > 0


def test_riemann_relations_genus_three(rng):
    for _ in range(5):
        e = np.sort(rng.normal(size=8))
        check_riemann_relations(period_matrix(HyperellipticCurve(tuple(e))).Z)


def test_quadrature_doubling_stable():
    e = np.array([-2.0, -1.1, -0.3, 0.4, 1.5, 2.7])
    A, B, n = raw_periods(HyperellipticCurve(tuple(e)), return_nodes=True)
    A2, B2 = _real_periods(e, 2, 2 * n)
    assert np.max(np.abs(A2 - A)) < 1e-8 and np.max(np.abs(B2 - B)) < 1e-8


def test_moebius_invariance_genus_two(rng):
    for _ in range(10):
        e = np.sort(rng.normal(size=6))
        base = reduced_period(HyperellipticCurve(tuple(e)))
        shifted = reduced_period(HyperellipticCurve(tuple(e + rng.uniform(-5, 5))))
        assert quotient_distance(base, shifted) < 1e-6
        scaled = reduced_period(HyperellipticCurve(tuple(e * rng.uniform(0.1, 10))))
        assert quotient_distance(base, scaled) < 1e-6
        # inversion about a point outside the branch set; one image lands at -1/(x-c) ordering
        c = e[-1] + 0.5
        inv = reduced_period(HyperellipticCurve(tuple(-1 / (e - c))))
        assert quotient_distance(base, inv) < 1e-6
        # five finite points plus infinity
        five = reduced_period(HyperellipticCurve(tuple(1 / (e[:5] - e[5]))))
        assert quotient_distance(base, five) < 1e-6


def test_torelli_examples():
    U = torelli_embed(HyperellipticCurve((-1.0, 0.0, 1.0)))
    assert isinstance(U, UniversalPoint) and U.genus == 1
    assert abs(U.point.Z[0, 0] - 1j) < 1e-6
    c1 = HyperellipticCurve((-1.0, 0.0, 1.0))
    c2 = HyperellipticCurve(tuple(np.exp(2j * np.pi * np.arange(3) / 3)))
    tagged = torelli_embed([c1, c2])
    assert tagged.descriptor == StratumDescriptor.boundary([1, 1])
    assert np.allclose(tagged.point.Z, np.diag([1j, RHO]), atol=1e-6)
    assert torelli_embed([c1, c2], as_boundary=False).descriptor == StratumDescriptor.interior(2)
    d = torelli_embed(HyperellipticCurve((-1.0, 0.0, 2.5)))
    assert not d.isclose(U, 1e-3)


# ---------------------------------------------------------------------------
# Bergman quantities


def bilinear_gram(curve):
    """Gram matrix of x^i dx / y from the period bilinear relations."""
    A, B = raw_periods(curve)
    Z = np.linalg.solve(A, B)
    G = A @ Z.imag @ A.conj().T
    if curve.genus == 1:
        return G
    c, s = _basis_frame(curve.points)
    g = curve.genus
    M = np.zeros((g, g))
    for i in range(g):
        for k in range(i + 1):
            M[i, k] = math.comb(i, k) * c ** (i - k) * s**k
    return M @ G @ M.T


@pytest.fixture(scope="module")
def torus():
    c = HyperellipticCurve((-2.0, -0.5, 1.0, 3.0))
    A, B = raw_periods(c)
    return c, (B[0, 0] / A[0, 0]), gram_matrix(c)


@pytest.fixture(scope="module")
def genus_two():
    c = HyperellipticCurve((-2.0, -1.1, -0.3, 0.4, 1.5, 2.7))
    return c, gram_matrix(c)


def test_gram_matches_bilinear_relations(torus, genus_two):
    c, _, G = torus
    assert np.allclose(G, bilinear_gram(c), rtol=1e-9)
    c2, G2 = genus_two
    assert np.allclose(G2, bilinear_gram(c2), rtol=1e-9)


def test_torus_density_flat(torus, rng):
    c, tau, G = torus
    for _ in range(5):
        x = complex(rng.normal(), rng.normal())
        r = bergman_density(c, x, G=G)
        assert r.density_value > 0
        assert abs(r.z_chart_density - 1 / tau.imag) < 1e-9


def test_total_mass_with_oracle_gram(torus, genus_two):
    c, _, _ = torus
    assert abs(bergman_total_mass(c, G=bilinear_gram(c)) - 1) < 1e-6
    c2, _ = genus_two
    assert abs(bergman_total_mass(c2, G=bilinear_gram(c2)) - 2) < 1e-6


def test_total_mass_scaling_invariant():
    c = HyperellipticCurve((-2.0, -0.5, 1.0, 3.0)).scaled(7.0)
    assert abs(bergman_total_mass(c) - 1) < 1e-6


def test_torus_quadratic_differential(torus):
    c, tau, G = torus
    w = QuadDifferential(1, (1.0,))
    val = bergman_qd_product(c, w, w, G=G)
    # frozen from the flat-torus integral (Im tau)^2 over the parallelogram
    assert abs(val - tau.imag**2) < 1e-6
    assert abs(val.imag) < 1e-9


def test_genus_two_density_positive(genus_two, rng):
    c, G = genus_two
    for _ in range(20):
        x = complex(rng.uniform(-3, 3), rng.uniform(-2, 2))
        assert bergman_density(c, x, G=G).density_value > 0


def test_genus_two_qd_hermitian(genus_two):
    c, G = genus_two
    w1 = QuadDifferential(2, (1, 0.5j, -0.2))
    w2 = QuadDifferential(2, (0.3, 1, 1j))
    a = bergman_qd_product(c, w1, w2, G=G)
    b = bergman_qd_product(c, w2, w1, G=G)
    assert abs(a - b.conjugate()) < 1e-9
    n1 = bergman_qd_product(c, w1, w1, G=G)
    assert n1.real > 0 and abs(n1.imag) < 1e-9 * n1.real


def test_bergman_errors(torus):
    c, _, G = torus
    with pytest.raises(QueryTooCloseToBranchPoint):
        bergman_density(c, -0.5 + 1e-8, G=G)
    with pytest.raises(GenusMismatch):
        bergman_qd_product(c, QuadDifferential(2, (1, 0, 0)), QuadDifferential(1, (1,)), G=G)
    with pytest.raises(Unsupported):
        QuadDifferential(3, (1, 0, 0, 0, 0, 0))
