import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phavail.ctmc import stationary_distribution
from phavail.errors import NonPositiveRate
from phavail.lindley import (
    Branch,
    ComponentParams,
    Law,
    availability_closed,
    availability_exponential_closed,
    availability_numeric,
    build_exponential_generator,
    build_single_component_generator,
    closed_form_terms,
    dA_dlambda,
    dA_dmu,
    initial_distribution,
    mttf_lindley,
    mttr,
    reliability_lindley,
    steady_state_availability,
    steady_state_exponential,
    steady_state_lindley,
)

from conftest import central_difference, lindley_survival_by_hand

TIMES = (0.5, 10.0, 100.0, 500.0, 3000.0)

# 1 - P_F(t) from a 50-digit matrix exponential of the 4-state generator
FROZEN_AVAILABILITY = {
    (0.004, 0.03): (0.99999011979390116, 0.99916184247714052, 0.9729469734097606,
                    0.93850784602860424, 0.93738306099575881),
    (0.002, 0.08): (0.99999755228425747, 0.99981949597020505, 0.99629022146987049,
                    0.98935467893428432, 0.98764220893373471),
    (1.0, 2.0): (0.84196986029286058, 0.75000000051528841, 0.75, 0.75, 0.75),
    (1.0, 1.0): (0.80644579929406972, 0.59999997604173615, 0.6, 0.6, 0.6),
    (0.5, 0.1): (0.91072903708108995, 0.25505947840876016, 0.25, 0.25, 0.25),
    (2.0, 0.5): (0.54213659644005615, 0.2499999999584211, 0.25, 0.25, 0.25),
}


# -- generator ----------------------------------------------------------------

def test_generator_layout():
    p = ComponentParams(1.0, 2.0)
    Q = build_single_component_generator(p).rates
    np.testing.assert_array_equal(Q, [[-1, 0, 0, 1], [0, -1, 1, 0], [0, 0, -1, 1], [1, 1, 0, -2]])
    np.testing.assert_array_equal(initial_distribution(p).probs, [0.5, 0.5, 0, 0])


def test_exponential_law():
    p = ComponentParams(0.004, 0.03, "exponential")
    assert p.law is Law.EXPONENTIAL
    np.testing.assert_array_equal(build_exponential_generator(p).rates, [[-0.004, 0.004], [0.03, -0.03]])
    assert steady_state_availability(p) == pytest.approx(0.03 / 0.034, rel=1e-15)


@pytest.mark.parametrize("lam,mu", [(0, 1), (-1, 1), (1, -0.1), (float("nan"), 1)])
def test_bad_params(lam, mu):
    with pytest.raises(NonPositiveRate):
        ComponentParams(lam, mu)


# -- transient availability ---------------------------------------------------

@pytest.mark.parametrize("rates", sorted(FROZEN_AVAILABILITY))
def test_closed_form_matches_frozen_values(rates):
    got = availability_closed(*rates, np.array(TIMES))
    np.testing.assert_allclose(got, FROZEN_AVAILABILITY[rates], atol=1e-12, rtol=0)


@pytest.mark.parametrize("rates", sorted(FROZEN_AVAILABILITY))
def test_ctmc_route_matches_frozen_values(rates):
    got = availability_numeric(*rates, np.array(TIMES))
    np.testing.assert_allclose(got, FROZEN_AVAILABILITY[rates], atol=1e-12, rtol=0)


@pytest.mark.parametrize("lam,mu,branch", [
    (0.004, 0.03, Branch.HYPERBOLIC),
    (1.0, 1.0, Branch.TRIGONOMETRIC),
    (1.0, 2.0, Branch.CRITICAL),
    (1.0, 2.0 * (1 + 5e-10), Branch.CRITICAL),
    (1.0, 2.0 * (1 + 5e-9), Branch.HYPERBOLIC),
    (1.0, 1.99999999, Branch.TRIGONOMETRIC),
])
def test_branches_agree_with_ctmc(lam, mu, branch):
    assert closed_form_terms(lam, mu).branch is branch
    ts = np.geomspace(1e-3, 200, 120)
    np.testing.assert_allclose(availability_closed(lam, mu, ts), availability_numeric(lam, mu, ts), atol=1e-10)


def test_critical_limit_is_continuous():
    lam, t = 1.0, 1.3
    left = availability_closed(lam, 2.0 * (1 - 1e-7), t)
    mid = availability_closed(lam, 2.0, t)
    right = availability_closed(lam, 2.0 * (1 + 1e-7), t)
    assert abs(left - mid) < 1e-6 and abs(right - mid) < 1e-6


def test_hyperbolic_no_overflow_at_large_t():
    out = availability_closed(0.004, 0.03, np.array([1e4, 1e6, 1e9]))
    assert np.all(np.isfinite(out))
    np.testing.assert_allclose(out, steady_state_lindley(0.004, 0.03), atol=1e-14)


def test_availability_is_one_at_zero():
    for lam, mu in FROZEN_AVAILABILITY:
        assert availability_closed(lam, mu, 0.0) == 1.0
        assert availability_exponential_closed(lam, mu, 0.0) == 1.0


def test_zero_repair_reduces_to_survival():
    for t in (0.0, 3.0, 400.0):
        assert availability_closed(0.004, 0.0, t) == pytest.approx(lindley_survival_by_hand(0.004, t), abs=1e-15)
        assert availability_numeric(0.004, 0.0, t) == pytest.approx(lindley_survival_by_hand(0.004, t), abs=1e-12)


def test_exponential_availability():
    lam, mu = 0.004, 0.03
    for t in (0.5, 50.0, 900.0):
        expected = mu / (lam + mu) + lam / (lam + mu) * math.exp(-(lam + mu) * t)
        assert availability_exponential_closed(lam, mu, t) == pytest.approx(expected, abs=1e-15)


def test_reliability_below_availability():
    ts = np.linspace(0, 500, 101)
    assert np.all(reliability_lindley(0.004, ts) <= availability_closed(0.004, 0.03, ts) + 1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-3, 5.0), st.floats(1e-3, 5.0), st.floats(0.0, 100.0))
def test_closed_form_agrees_with_ctmc_everywhere(lam, mu, t):
    a = availability_closed(lam, mu, t)
    assert 0.0 <= a <= 1.0 + 1e-12
    assert a == pytest.approx(availability_numeric(lam, mu, t), abs=1e-9)


# -- long-run quantities ------------------------------------------------------

@pytest.mark.parametrize("lam,mu", [(0.004, 0.03), (0.002, 0.08), (1.0, 1.0), (3.0, 0.2)])
def test_steady_state_matches_stationary_solve(lam, mu):
    pi = stationary_distribution(build_single_component_generator(ComponentParams(lam, mu))).probs
    assert steady_state_lindley(lam, mu) == pytest.approx(1 - pi[3], abs=1e-13)


def test_steady_state_is_mttf_over_cycle():
    lam, mu = 0.004, 0.03
    assert steady_state_lindley(lam, mu) == pytest.approx(mttf_lindley(lam) / (mttf_lindley(lam) + mttr(mu)), rel=1e-14)


def test_nominal_component_values():
    # four-decimal values of the bundled components
    assert round(steady_state_exponential(0.004, 0.03), 4) == 0.8824
    assert round(steady_state_lindley(0.004, 0.03), 4) == 0.9374
    assert round(steady_state_exponential(0.002, 0.08), 4) == 0.9756
    assert round(steady_state_lindley(0.002, 0.08), 4) == 0.9876


def test_lindley_beats_exponential_at_equal_rates():
    for lam in (0.001, 0.01, 0.1):
        for mu in (0.01, 0.1, 1.0):
            assert steady_state_lindley(lam, mu) > steady_state_exponential(lam, mu)


def test_mttr_requires_repair():
    with pytest.raises(NonPositiveRate):
        mttr(0.0)


@pytest.mark.parametrize("lam,mu", [(0.004, 0.03), (0.002, 0.08), (0.5, 0.7)])
def test_derivatives_against_finite_differences(lam, mu):
    h_lam, h_mu = lam * 1e-5, mu * 1e-5
    fd_lam = central_difference(lambda x: steady_state_lindley(x, mu), lam, h_lam)
    fd_mu = central_difference(lambda x: steady_state_lindley(lam, x), mu, h_mu)
    assert dA_dlambda(lam, mu) == pytest.approx(fd_lam, rel=1e-7)
    assert dA_dmu(lam, mu) == pytest.approx(fd_mu, rel=1e-7)
    assert dA_dlambda(lam, mu) < 0 < dA_dmu(lam, mu)
