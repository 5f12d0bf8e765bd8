"""Phase-type distributions and the order-3 Lindley representation."""

import math
from dataclasses import dataclass

import numpy as np

from .ctmc import PROB_ATOL, _check_time, _check_times, expm_action
from .errors import (
    DimensionMismatch,
    InvalidDistribution,
    NegativeOffDiagonal,
    NonPositiveRate,
    NonSquare,
    PositiveDiagonal,
    RowSumNonzero,
    SingularMatrix,
)


def _check_rate(name, value, allow_zero=False):
    v = float(value)
    if not math.isfinite(v) or v < 0 or (v == 0 and not allow_zero):
        raise NonPositiveRate(name, value)
    return v


def _absorbing_reachable(A, exit_rates):
    """True iff every transient phase has a path to absorption."""
    m = A.shape[0]
    reach = exit_rates > 0
    changed = True
    while changed:
        changed = False
        for i in range(m):
            if not reach[i] and np.any((A[i] > 0) & reach):
                reach[i] = True
                changed = True
    return bool(reach.all())


@dataclass(frozen=True, eq=False)
class PhaseTypeDistribution:
    """Time to absorption of a CTMC started in phase ``i`` with probability ``alpha[i]``.

    ``A`` holds transition rates among the transient phases; the exit rates
    into the (implicit) absorbing state are ``-A @ 1``.
    """

    alpha: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float).reshape(-1)
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise NonSquare(A.shape)
        if alpha.shape[0] != A.shape[0]:
            raise DimensionMismatch(f"alpha has {alpha.shape[0]} phases, A has {A.shape[0]}")
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(A))):
            raise InvalidDistribution("alpha and A must be finite")
        if alpha.min() < 0 or abs(alpha.sum() - 1.0) > PROB_ATOL:
            raise InvalidDistribution(f"alpha must be a probability vector, got {alpha.tolist()}")
        for i in range(A.shape[0]):
            if A[i, i] >= 0:
                raise PositiveDiagonal(i, float(A[i, i]))
            for j in range(A.shape[0]):
                if i != j and A[i, j] < 0:
                    raise NegativeOffDiagonal(i, j, float(A[i, j]))
        exit_rates = -A.sum(axis=1)
        for i, s in enumerate(exit_rates):
            if s < -PROB_ATOL * max(1.0, abs(A[i, i])):
                raise RowSumNonzero(i, float(-s))
        exit_rates = np.maximum(exit_rates, 0.0)
        if not _absorbing_reachable(A, exit_rates):
            raise SingularMatrix("some phase can never reach absorption; A is singular")
        alpha.setflags(write=False)
        A.setflags(write=False)
        exit_rates.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "exit_rates", exit_rates)

    @property
    def order(self) -> int:
        return self.A.shape[0]


def exponential_ph(rate) -> PhaseTypeDistribution:
    rate = _check_rate("lambda", rate)
    return PhaseTypeDistribution([1.0], [[-rate]])


def lindley_ph(lam) -> PhaseTypeDistribution:
    """Order-3 representation of Lindley(lam): phases (E, G0, G1).

    E absorbs at rate ``lam``; G0 -> G1 -> absorption is the two-stage gamma
    path.  G1 is never an initial phase.
    """
    lam = _check_rate("lambda", lam)
    a1 = lam / (lam + 1.0)
    A = [[-lam, 0.0, 0.0],
         [0.0, -lam, lam],
         [0.0, 0.0, -lam]]
    return PhaseTypeDistribution([a1, 1.0 - a1, 0.0], A)


def ph_survival(ph: PhaseTypeDistribution, t):
    """``P(T > t) = alpha exp(A t) 1``; ``t`` may be a scalar or a grid."""
    if np.ndim(t) == 0:
        _check_time(t)
    else:
        _check_times(t)
    mass = expm_action(ph.A, ph.alpha, t)
    return np.clip(mass.sum(axis=-1), 0.0, 1.0)


def ph_density(ph: PhaseTypeDistribution, t):
    """``f(t) = alpha exp(A t) a`` with exit-rate vector ``a``."""
    return expm_action(ph.A, ph.alpha, t) @ ph.exit_rates


def lindley_survival_closed(lam, t):
    """Lindley survival ``(1 + lam t / (lam + 1)) exp(-lam t)``."""
    lam = _check_rate("lambda", lam)
    ts = np.asarray(t, dtype=float)
    if ts.ndim == 0:
        _check_time(ts)
    else:
        _check_times(ts)
    out = (1.0 + lam * ts / (lam + 1.0)) * np.exp(-lam * ts)
    return float(out) if out.ndim == 0 else out


def ph_moment(ph: PhaseTypeDistribution, k=1) -> float:
    """Raw moment ``E[T^k] = k! alpha (-A)^{-k} 1``."""
    v = np.ones(ph.order)
    try:
        for _ in range(k):
            v = np.linalg.solve(-ph.A, v)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from None
    return math.factorial(k) * float(ph.alpha @ v)


def ph_mean(ph: PhaseTypeDistribution) -> float:
    return ph_moment(ph, 1)


def ph_variance(ph: PhaseTypeDistribution) -> float:
    m1 = ph_moment(ph, 1)
    return ph_moment(ph, 2) - m1 * m1


def _choose(weights, total, u):
    # inverse-CDF pick over ``weights`` (which need not sum exactly to ``total``)
    acc = 0.0
    target = u * total
    for i, w in enumerate(weights):
        acc += w
        if target < acc:
            return i
    return len(weights) - 1


def ph_sample(ph: PhaseTypeDistribution, rng: np.random.Generator) -> float:
    """Draw one absorption time by walking the phase chain.

    Each visit spends an exponential sojourn at the phase's total outflow
    rate, then jumps to another phase or absorbs in proportion to the rates.
    Draws are skipped when the next step is forced, so a Lindley sample uses
    one uniform for the starting branch plus one exponential per phase.
    """
    alpha, A, exits = ph.alpha, ph.A, ph.exit_rates
    m = ph.order
    starts = np.flatnonzero(alpha > 0)
    phase = int(starts[0]) if starts.size == 1 else _choose(alpha, 1.0, rng.random())
    t = 0.0
    while True:
        total = -A[phase, phase]
        t += rng.exponential(1.0 / total)
        dest = [A[phase, j] if j != phase else 0.0 for j in range(m)] + [exits[phase]]
        options = [j for j, w in enumerate(dest) if w > 0]
        nxt = options[0] if len(options) == 1 else _choose(dest, total, rng.random())
        if nxt == m:
            return t
        phase = nxt
