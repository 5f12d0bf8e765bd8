"""Dense continuous-time Markov chain engine.

Transient probabilities come from uniformization (Jensen's method): with
``P = I + Q / r`` for a rate ``r`` at least as large as every exit rate,

    p0 exp(Q t) = sum_k Poisson(k; r t) * p0 P^k

and the Poisson series is cut where the neglected mass drops below
``TRUNCATION_EPS``.  Stationary distributions come from one dense LU solve.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _accel
from ._accel import kernel
from .errors import (
    DimensionMismatch,
    InvalidDistribution,
    NegativeOffDiagonal,
    NegativeTime,
    NonSquare,
    RowSumNonzero,
    SingularSystem,
)

# Module-level tolerances; every public function also takes them as keywords.
ROW_SUM_ATOL = 1e-12
PROB_ATOL = 1e-12
TRUNCATION_EPS = 1e-12
UNIFORMIZATION_FACTOR = 1.05
STATIONARY_RESIDUAL_TOL = 1e-12

# above this size BLAS matrix products beat the compiled scalar loops
LOOP_KERNEL_MAX_STATES = 64


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """A validated CTMC generator (rates per day). Build with :func:`validate_generator`."""

    rates: np.ndarray

    @property
    def n(self) -> int:
        return self.rates.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.rates, dtype=dtype)


@dataclass(frozen=True, eq=False)
class StateDistribution:
    """Probability row vector over the states of a chain."""

    probs: np.ndarray

    def __post_init__(self):
        p = _frozen(self.probs)
        if p.ndim != 1 or p.size == 0:
            raise InvalidDistribution(f"expected a non-empty vector, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise InvalidDistribution("probabilities must be finite")
        if p.min() < -PROB_ATOL or p.max() > 1 + PROB_ATOL:
            raise InvalidDistribution(f"entries must lie in [0, 1], got range [{p.min()!r}, {p.max()!r}]")
        if abs(p.sum() - 1.0) > PROB_ATOL:
            raise InvalidDistribution(f"entries must sum to 1, got {p.sum()!r}")
        object.__setattr__(self, "probs", p)

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)

    def __len__(self):
        return self.n

    def __getitem__(self, item):
        return self.probs[item]


def validate_generator(raw, *, atol=ROW_SUM_ATOL) -> GeneratorMatrix:
    """Check ``raw`` is a generator matrix and wrap it.

    Entries are never adjusted: a row that is off by more than ``atol`` is
    reported, not fixed.
    """
    q = np.array(raw, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] == 0:
        raise NonSquare(q.shape)
    if not np.all(np.isfinite(q)):
        raise InvalidDistribution("generator entries must be finite")
    off = q.copy()
    np.fill_diagonal(off, 0.0)
    bad = np.argwhere(off < 0)
    if bad.size:
        i, j = (int(x) for x in bad[0])
        raise NegativeOffDiagonal(i, j, float(q[i, j]))
    sums = q.sum(axis=1)
    for i, s in enumerate(sums):
        if abs(s) > atol:
            raise RowSumNonzero(i, float(s))
    return GeneratorMatrix(_frozen(q))


def as_generator(q) -> GeneratorMatrix:
    return q if isinstance(q, GeneratorMatrix) else validate_generator(q)


def _as_distribution(p0) -> StateDistribution:
    return p0 if isinstance(p0, StateDistribution) else StateDistribution(p0)


def _check_time(t):
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise NegativeTime(t)
    return t


def _check_times(times):
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    if ts.ndim != 1:
        raise DimensionMismatch(f"time grid must be one-dimensional, got shape {ts.shape}")
    bad = ~np.isfinite(ts) | (ts < 0)
    if bad.any():
        raise NegativeTime(float(ts[bad][0]))
    return ts


# -- uniformization -----------------------------------------------------------

def poisson_window(mean, eps=TRUNCATION_EPS):
    """Return ``(left, weights)`` covering all but ``eps`` of a Poisson(mean) law.

    Weights are built outward from the mode by ratio recurrences and stop once
    a geometric bound on the remaining tail falls below ``eps / 2`` on each
    side, then renormalized to sum to one.
    """
    if mean == 0.0:
        return 0, np.ones(1)
    mode = int(math.floor(mean))
    w_mode = math.exp(-mean + mode * math.log(mean) - math.lgamma(mode + 1))
    half = eps / 2

    right = []
    k, w = mode, w_mode
    while True:
        q = mean / (k + 1)
        if w * q / (1 - q) <= half:
            break
        w *= q
        k += 1
        right.append(w)

    left = []
    k, w = mode, w_mode
    while k > 0:
        q = k / mean
        if q < 1 and w * q / (1 - q) <= half:
            break
        w *= q
        k -= 1
        left.append(w)

    weights = np.array(left[::-1] + [w_mode] + right)
    return k, weights / weights.sum()


@kernel
def _accumulate_loops(P, p0, starts, ends, offsets, weights, out):
    n = P.shape[0]
    nt = starts.shape[0]
    kmax = 0
    for m in range(nt):
        if ends[m] > kmax:
            kmax = ends[m]
    v = p0.copy()
    w = np.empty(n)
    for k in range(kmax):
        if k > 0:
            for j in range(n):
                s = 0.0
                for i in range(n):
                    s += v[i] * P[i, j]
                w[j] = s
            v, w = w, v
        for m in range(nt):
            if starts[m] <= k < ends[m]:
                c = weights[offsets[m] + k - starts[m]]
                for j in range(n):
                    out[m, j] += c * v[j]


def _accumulate_numpy(P, p0, starts, ends, offsets, weights, out, block=512):
    n = P.shape[0]
    kmax = int(ends.max())
    v = p0.copy()
    buf = np.empty((block, n))
    for b0 in range(0, kmax, block):
        b1 = min(b0 + block, kmax)
        for k in range(b0, b1):
            if k > 0:
                v = v @ P
            buf[k - b0] = v
        for m in range(starts.shape[0]):
            lo, hi = max(starts[m], b0), min(ends[m], b1)
            if lo < hi:
                off = offsets[m] - starts[m]
                out[m] += weights[off + lo:off + hi] @ buf[lo - b0:hi - b0]


def _uniformize(rates, p0, times, eps):
    """Rows ``p0 @ expm(rates * t)`` for each ``t``; ``rates`` must be a generator."""
    n = rates.shape[0]
    out = np.zeros((times.shape[0], n))
    r = UNIFORMIZATION_FACTOR * float(np.max(-np.diag(rates)))
    if r == 0.0 or n == 1:
        out[:] = p0
        return out
    P = np.eye(n) + rates / r
    wins = [poisson_window(r * t, eps) for t in times]
    starts = np.array([s for s, _ in wins], dtype=np.int64)
    lengths = np.array([w.size for _, w in wins], dtype=np.int64)
    ends = starts + lengths
    offsets = np.concatenate(([0], np.cumsum(lengths)[:-1])).astype(np.int64)
    weights = np.concatenate([w for _, w in wins])
    p0 = np.ascontiguousarray(p0, dtype=float)
    if _accel.USE_NUMBA and n < LOOP_KERNEL_MAX_STATES:
        _accumulate_loops(np.ascontiguousarray(P), p0, starts, ends, offsets, weights, out)
    else:
        _accumulate_numpy(P, p0, starts, ends, offsets, weights, out)
    return out


def transient_curve(Q, p0, times, *, eps=TRUNCATION_EPS) -> np.ndarray:
    """Transient distributions on a whole time grid, shape ``(len(times), n)``.

    One pass over the powers ``p0 P^k`` serves every grid point.
    """
    Q = as_generator(Q)
    p0 = _as_distribution(p0)
    if p0.n != Q.n:
        raise DimensionMismatch(f"p0 has {p0.n} states, Q has {Q.n}")
    ts = _check_times(times)
    return _uniformize(Q.rates, p0.probs, ts, eps)


def transient_distribution(Q, p0, t, *, eps=TRUNCATION_EPS) -> StateDistribution:
    """Solve dP/dt = P Q from ``P(0) = p0`` and return ``P(t)``."""
    Q = as_generator(Q)
    p0 = _as_distribution(p0)
    if p0.n != Q.n:
        raise DimensionMismatch(f"p0 has {p0.n} states, Q has {Q.n}")
    t = _check_time(t)
    if t == 0.0 or Q.n == 1:
        return p0
    row = _uniformize(Q.rates, p0.probs, np.array([t]), eps)[0]
    return StateDistribution(row)


def expm_action(A, v, t, *, eps=TRUNCATION_EPS, atol=ROW_SUM_ATOL) -> np.ndarray:
    """Row-vector action ``v @ expm(A t)`` for a (sub-)generator ``A``.

    ``A`` may leak mass (row sums <= 0).  It is embedded in a generator with
    one extra absorbing state that collects the leak, which is dropped from
    the result.  ``t`` may be a scalar or a 1-D grid; a grid gives one row per
    time.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise NonSquare(A.shape)
    v = np.asarray(v, dtype=float)
    n = A.shape[0]
    if v.shape != (n,):
        raise DimensionMismatch(f"vector of shape {v.shape} does not match {n}x{n} matrix")
    scalar = np.ndim(t) == 0
    ts = _check_times(t)

    off = A.copy()
    np.fill_diagonal(off, 0.0)
    bad = np.argwhere(off < 0)
    if bad.size:
        i, j = (int(x) for x in bad[0])
        raise NegativeOffDiagonal(i, j, float(A[i, j]))
    leak = -A.sum(axis=1)
    for i, s in enumerate(leak):
        if s < -atol:
            raise RowSumNonzero(i, float(-s))

    G = np.zeros((n + 1, n + 1))
    G[:n, :n] = A
    G[:n, n] = np.maximum(leak, 0.0)
    np.fill_diagonal(G[:n, :n], -(off.sum(axis=1) + G[:n, n]))
    ext = np.append(v, 0.0)
    res = _uniformize(G, ext, ts, eps)[:, :n]
    return res[0] if scalar else res


# -- stationary distribution --------------------------------------------------

def stationary_distribution(Q, *, residual_tol=STATIONARY_RESIDUAL_TOL) -> StateDistribution:
    """Solve ``pi Q = 0``, ``sum(pi) = 1`` by LU with partial pivoting.

    The last balance equation is replaced by the normalization row.  A
    numerically singular system, a residual above ``residual_tol`` or a
    clearly negative probability means the chain has no unique stationary
    law, and :class:`SingularSystem` is raised.
    """
    Q = as_generator(Q)
    n = Q.n
    if n == 1:
        return StateDistribution(np.ones(1))
    M = Q.rates.T.copy()
    M[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
        except (scipy.linalg.LinAlgWarning, np.linalg.LinAlgError) as exc:
            raise SingularSystem(f"balance equations are singular: {exc}") from None
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= n * np.finfo(float).eps * pivots.max():
        raise SingularSystem("balance equations are numerically singular (reducible chain?)")
    pi = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    if not np.all(np.isfinite(pi)):
        raise SingularSystem("solver produced non-finite probabilities")
    residual = float(np.max(np.abs(pi @ Q.rates)))
    if residual > residual_tol:
        raise SingularSystem(f"residual {residual:.3e} exceeds {residual_tol:.1e}")
    if pi.min() < -PROB_ATOL:
        raise SingularSystem(f"negative stationary probability {pi.min()!r}")
    return StateDistribution(np.clip(pi, 0.0, 1.0))
