"""Single repairable component with Lindley failure times and exponential repair.

The chain has states (E0, G0, G1, F).  E0 fails directly at rate lambda;
G0 -> G1 -> F is the two-stage gamma path; F is repaired at rate mu and
restarts in E0 or G0 with the Lindley mixing weights.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .ctmc import GeneratorMatrix, StateDistribution, _check_time, _check_times, transient_curve, validate_generator
from .phase_type import _check_rate, lindley_survival_closed

# |disc| below this fraction of mu**2 is treated as the critically damped case
CRITICAL_REL_TOL = 1e-9

# beyond this value of omega*t/2 cosh/sinh are evaluated as plain exponentials
_HYPERBOLIC_SPLIT = 20.0


class Law(str, enum.Enum):
    LINDLEY = "lindley"
    EXPONENTIAL = "exponential"


class Branch(str, enum.Enum):
    HYPERBOLIC = "hyperbolic"
    TRIGONOMETRIC = "trigonometric"
    CRITICAL = "critical"


@dataclass(frozen=True)
class ComponentParams:
    """Failure rate ``lam`` and repair rate ``mu`` (per day) of one component.

    ``mu = 0`` describes a component that is never repaired.
    """

    lam: float
    mu: float
    law: Law = Law.LINDLEY

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_rate("lambda", self.lam))
        object.__setattr__(self, "mu", _check_rate("mu", self.mu, allow_zero=True))
        object.__setattr__(self, "law", Law(self.law))

    @property
    def alpha1(self) -> float:
        return self.lam / (self.lam + 1.0)

    @property
    def alpha2(self) -> float:
        return 1.0 - self.alpha1


@dataclass(frozen=True)
class ClosedFormTerms:
    disc: float
    omega: float
    bigM: float
    steady: float
    decay: float
    branch: Branch


def closed_form_terms(lam, mu) -> ClosedFormTerms:
    """Constants of the closed-form availability for one (lam, mu) pair.

    For the trigonometric branch ``omega`` is ``sqrt(-disc)`` and ``bigM`` the
    matching real coefficient; for the critical branch ``bigM`` holds the
    limit slope ``K`` in ``M sinh(omega t / 2) -> K t``.
    """
    lam = _check_rate("lambda", lam)
    mu = _check_rate("mu", mu, allow_zero=True)
    disc = mu * mu - 4.0 * lam * mu / (lam + 1.0)
    num = (mu - 2.0) * lam * lam + 2.0 * (mu - 1.0) * lam - mu
    steady = steady_state_lindley(lam, mu)
    decay = lam + 0.5 * mu
    if disc > CRITICAL_REL_TOL * mu * mu:
        omega = math.sqrt(disc)
        return ClosedFormTerms(disc, omega, num / (omega * (lam + 1.0) ** 2), steady, decay, Branch.HYPERBOLIC)
    if disc < -CRITICAL_REL_TOL * mu * mu:
        omega = math.sqrt(-disc)
        return ClosedFormTerms(disc, omega, num / (omega * (lam + 1.0) ** 2), steady, decay, Branch.TRIGONOMETRIC)
    return ClosedFormTerms(disc, math.sqrt(abs(disc)), num / (2.0 * (lam + 1.0) ** 2), steady, decay, Branch.CRITICAL)


def _times(t):
    ts = np.asarray(t, dtype=float)
    if ts.ndim == 0:
        _check_time(ts)
    else:
        _check_times(ts)
    return ts


def _scalar_or_array(out):
    return float(out) if np.ndim(out) == 0 else out


# -- generators ---------------------------------------------------------------

def build_single_component_generator(p: ComponentParams) -> GeneratorMatrix:
    """4x4 generator over (E0, G0, G1, F)."""
    lam, mu = p.lam, p.mu
    q = [[-lam, 0.0, 0.0, lam],
         [0.0, -lam, lam, 0.0],
         [0.0, 0.0, -lam, lam],
         [mu * p.alpha1, mu * p.alpha2, 0.0, -mu]]
    return validate_generator(q)


def build_exponential_generator(p: ComponentParams) -> GeneratorMatrix:
    """2x2 generator over (Up, F) for an exponential component."""
    return validate_generator([[-p.lam, p.lam], [p.mu, -p.mu]])


def initial_distribution(p: ComponentParams) -> StateDistribution:
    """Start-up distribution matching the component's generator."""
    if p.law is Law.EXPONENTIAL:
        return StateDistribution([1.0, 0.0])
    return StateDistribution([p.alpha1, p.alpha2, 0.0, 0.0])


def component_generator(p: ComponentParams) -> GeneratorMatrix:
    if p.law is Law.EXPONENTIAL:
        return build_exponential_generator(p)
    return build_single_component_generator(p)


# -- availability -------------------------------------------------------------

def availability_closed(lam, mu, t):
    """Point availability A(t) of a Lindley component, from the closed form.

    ``A = steady + (1 - steady) (cosh(w t/2) - M sinh(w t/2)) exp(-(lam + mu/2) t)``
    continued to cos/sin when the discriminant is negative and to its
    ``w -> 0`` limit when it vanishes.  ``mu = 0`` gives the Lindley survival
    function.
    """
    lam = _check_rate("lambda", lam)
    mu = _check_rate("mu", mu, allow_zero=True)
    ts = _times(t)
    if mu == 0.0:
        return reliability_lindley(lam, ts)
    c = closed_form_terms(lam, mu)
    d = c.decay
    if c.branch is Branch.HYPERBOLIC:
        x = 0.5 * c.omega * ts
        # cosh/sinh overflow for large x; the combined exponents are negative since omega < mu
        big = x > _HYPERBOLIC_SPLIT
        xs = np.where(big, 0.0, x)
        near = (np.cosh(xs) - c.bigM * np.sinh(xs)) * np.exp(-d * ts)
        hi = 0.5 * ((1.0 - c.bigM) * np.exp((0.5 * c.omega - d) * ts)
                    + (1.0 + c.bigM) * np.exp((-0.5 * c.omega - d) * ts))
        shape = np.where(big, hi, near)
    elif c.branch is Branch.TRIGONOMETRIC:
        x = 0.5 * c.omega * ts
        shape = (np.cos(x) - c.bigM * np.sin(x)) * np.exp(-d * ts)
    else:
        shape = (1.0 - c.bigM * ts) * np.exp(-d * ts)
    out = c.steady + (1.0 - c.steady) * shape
    out = np.where(ts == 0.0, 1.0, out)
    return _scalar_or_array(out)


def availability_numeric(lam, mu, t):
    """``1 - P_F(t)`` from the transient solution of the 4-state chain."""
    p = ComponentParams(lam, mu)
    ts = _times(t)
    curve = transient_curve(build_single_component_generator(p), initial_distribution(p), ts.reshape(-1))
    out = 1.0 - curve[:, 3]
    return _scalar_or_array(out.reshape(ts.shape))


def availability_exponential_closed(lam, mu, t):
    """Exponential-failure availability ``mu/(lam+mu) + lam/(lam+mu) exp(-(lam+mu) t)``."""
    lam = _check_rate("lambda", lam)
    mu = _check_rate("mu", mu, allow_zero=True)
    ts = _times(t)
    s = lam + mu
    # 1 - lam/s (1 - exp(-s t)); exact 1 at t = 0
    out = 1.0 + lam / s * np.expm1(-s * ts)
    return _scalar_or_array(out)


def reliability_lindley(lam, t):
    """Survival without repair, ``(1 + lam + lam t) / (lam + 1) exp(-lam t)``."""
    return lindley_survival_closed(lam, t)


# -- long-run quantities ------------------------------------------------------

def steady_state_lindley(lam, mu) -> float:
    lam = _check_rate("lambda", lam)
    mu = _check_rate("mu", mu, allow_zero=True)
    return mu * (lam + 2.0) / (lam * (lam + 1.0) + mu * (lam + 2.0))


def steady_state_exponential(lam, mu) -> float:
    lam = _check_rate("lambda", lam)
    mu = _check_rate("mu", mu, allow_zero=True)
    return mu / (lam + mu)


def steady_state_availability(p: ComponentParams) -> float:
    """Long-run availability under the component's failure law."""
    if p.law is Law.EXPONENTIAL:
        return steady_state_exponential(p.lam, p.mu)
    return steady_state_lindley(p.lam, p.mu)


def mttf_lindley(lam) -> float:
    """Mean time to failure, ``(lam + 2) / (lam (lam + 1))``."""
    lam = _check_rate("lambda", lam)
    return (lam + 2.0) / (lam * (lam + 1.0))


def mttr(mu) -> float:
    """Mean time to repair, ``1 / mu``.  A non-repairable component has none."""
    return 1.0 / _check_rate("mu", mu)


def dA_dlambda(lam, mu) -> float:
    """Sensitivity of the Lindley long-run availability to the failure rate."""
    lam = _check_rate("lambda", lam)
    mu = _check_rate("mu", mu)
    den = lam * (lam + 1.0) + mu * (lam + 2.0)
    return -mu * (lam * lam + 4.0 * lam + 2.0) / (den * den)


def dA_dmu(lam, mu) -> float:
    """Sensitivity of the Lindley long-run availability to the repair rate."""
    lam = _check_rate("lambda", lam)
    mu = _check_rate("mu", mu, allow_zero=True)
    den = lam * (lam + 1.0) + mu * (lam + 2.0)
    return lam * (lam + 1.0) * (lam + 2.0) / (den * den)
