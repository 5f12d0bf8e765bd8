import math

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg

from phavail.lindley import ComponentParams
from phavail.system import SystemModel

# bundled CCHP model rates, per day
CCHP_RATES = {"G": (0.004, 0.03), "ICE": (0.002, 0.08), "AC": (0.002, 0.08)}


def cchp_params(law="lindley"):
    return [ComponentParams(lam, mu, law) for lam, mu in CCHP_RATES.values()]


def cchp_model(structure="series", law="lindley"):
    return SystemModel("cchp", structure, list(zip(CCHP_RATES, cchp_params(law))))


# -- independent oracles ------------------------------------------------------
# None of these go through uniformization or the closed forms under test.

def expm_oracle(Q, p0, t):
    """Row vector p0 @ expm(Q t) via scipy's Pade scaling-and-squaring."""
    return np.asarray(p0, dtype=float) @ scipy.linalg.expm(np.asarray(Q, dtype=float) * t)


def lindley_survival_by_hand(lam, t):
    """Mixture of exponential(lam) and gamma(2, lam) survival functions."""
    a1 = lam / (lam + 1)
    return a1 * math.exp(-lam * t) + (1 - a1) * (1 + lam * t) * math.exp(-lam * t)


def integrate_to_infinity(f, scale):
    """Adaptive Gauss-Kronrod quadrature of f on [0, inf) split at multiples of ``scale``."""
    total = 0.0
    edges = [0.0] + [scale * k for k in (1, 5, 20, 50, 200)]
    for a, b in zip(edges[:-1], edges[1:]):
        total += scipy.integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return total


def central_difference(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def random_generator(rng, n, scale=1.0, density=1.0):
    R = rng.random((n, n)) * scale
    R *= rng.random((n, n)) < density
    np.fill_diagonal(R, 0.0)
    return R - np.diag(R.sum(axis=1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary -------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
