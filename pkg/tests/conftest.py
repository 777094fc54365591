import numpy as np
import pytest

from siegel_moduli.siegel import basis_change, identity, make_siegel_point, standard_J, translation


def random_point(rng, g, spread=1.0):
    X = rng.uniform(-spread, spread, (g, g))
    X = (X + X.T) / 2
    L = rng.normal(size=(g, g))
    Y = L @ L.T + 0.3 * np.eye(g)
    return make_siegel_point(X, Y)


def random_generator(rng, g):
    """One of J, a translation by a small symmetric integer matrix, or an elementary basis change."""
    k = rng.integers(3)
    if k == 0:
        return standard_J(g)
    if k == 1:
        S = rng.integers(-1, 2, (g, g))
        return translation(np.triu(S) + np.triu(S, 1).T)
    U = np.eye(g, dtype=int)
    if g > 1:
        i, j = rng.choice(g, 2, replace=False)
        U[i, j] = rng.choice([-1, 1])
    else:
        U[0, 0] = -1
    return basis_change(U)


def random_word(rng, g, length=8):
    M = identity(g)
    for _ in range(length):
        M = random_generator(rng, g) @ M
    return M


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
