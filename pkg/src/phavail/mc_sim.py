"""Discrete-event Monte Carlo estimate of availability.

Every component runs an alternating renewal process: a phase-type up time
(sampled by walking its phase chain), then an exponential repair, then a
fresh up time, until the horizon.  Components are simulated independently on
their own random substreams and combined afterwards by the system structure.

The per-replication loop is one kernel.  Under numba it is compiled; without
it the same code runs as Python on numpy's legacy global generator, which
produces the same MT19937 stream, so both paths give identical estimates.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from ._accel import kernel
from .errors import InvalidPlan
from .lindley import Law
from .phase_type import exponential_ph, lindley_ph
from .system import Structure, SystemModel

DEFAULT_BURN_IN_FRACTION = 0.2


@dataclass(frozen=True, eq=False)
class SimulationPlan:
    model: SystemModel
    horizon: float
    replications: int
    seed: int = 42
    checkpoints: tuple = ()
    burn_in: float = None

    def __post_init__(self):
        horizon = float(self.horizon)
        if not math.isfinite(horizon) or horizon <= 0:
            raise InvalidPlan(f"horizon must be positive, got {self.horizon!r}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise InvalidPlan(f"replications must be a positive integer, got {self.replications!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InvalidPlan(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        cps = np.array(self.checkpoints, dtype=float).reshape(-1)
        if cps.size and (np.any(np.diff(cps) <= 0) or cps[0] < 0 or cps[-1] > horizon):
            raise InvalidPlan("checkpoints must be strictly increasing and inside [0, horizon]")
        burn = DEFAULT_BURN_IN_FRACTION * horizon if self.burn_in is None else float(self.burn_in)
        if not 0 <= burn < horizon:
            raise InvalidPlan(f"burn-in must lie in [0, horizon), got {burn!r}")
        cps.setflags(write=False)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "checkpoints", cps)
        object.__setattr__(self, "burn_in", burn)


@dataclass(frozen=True, eq=False)
class AvailabilityEstimate:
    checkpoints: np.ndarray
    pointwise_mean: np.ndarray
    pointwise_se: np.ndarray
    long_run: float
    long_run_se: float
    burn_in: float
    replications: int
    component_long_run: np.ndarray = field(default=None)
    component_long_run_se: np.ndarray = field(default=None)


def substream_seeds(root_seed, replications, components):
    """32-bit seed for every (replication, component) pair.

    Each seed depends only on its own indices, so adding replications never
    changes the streams of earlier ones.
    """
    out = np.empty((replications, components), dtype=np.int64)
    for r in range(replications):
        for k in range(components):
            ss = np.random.SeedSequence(root_seed, spawn_key=(r, k))
            out[r, k] = int(ss.generate_state(1, dtype=np.uint32)[0])
    return out


# -- kernels ------------------------------------------------------------------

@kernel
def _draw_ph(alpha, A, exits, m):
    phase = -1
    npos = 0
    for i in range(m):
        if alpha[i] > 0.0:
            npos += 1
            phase = i
    if npos > 1:
        u = np.random.random()
        acc = 0.0
        for i in range(m):
            acc += alpha[i]
            if u < acc:
                phase = i
                break
    t = 0.0
    while True:
        total = -A[phase, phase]
        t += -math.log(1.0 - np.random.random()) / total
        nopt = 0
        only = m
        for j in range(m):
            if j != phase and A[phase, j] > 0.0:
                nopt += 1
                only = j
        if exits[phase] > 0.0:
            nopt += 1
            only = m
        nxt = only
        if nopt > 1:
            u = np.random.random() * total
            acc = 0.0
            nxt = m
            for j in range(m):
                if j != phase:
                    acc += A[phase, j]
                    if u < acc:
                        nxt = j
                        break
        if nxt == m:
            return t
        phase = nxt


@kernel
def _up_time(times, deltas, n_units, parallel, burn, horizon):
    # times sorted ascending; deltas +1 on failure, -1 on repair
    failed = 0
    t_prev = burn
    up = 0.0
    for e in range(times.shape[0]):
        te = times[e]
        if te > burn:
            if (parallel and failed < n_units) or (not parallel and failed == 0):
                up += te - t_prev
            t_prev = te
        failed += deltas[e]
    if (parallel and failed < n_units) or (not parallel and failed == 0):
        up += horizon - t_prev
    return up


@kernel
def _simulate_kernel(alphas, As, exits, orders, mus, parallel, horizon, burn,
                     checkpoints, seeds, sys_frac, comp_frac, point):
    R = seeds.shape[0]
    c = seeds.shape[1]
    span = horizon - burn
    buf = np.empty((c, 256))
    counts = np.zeros(c, dtype=np.int64)
    for r in range(R):
        for k in range(c):
            np.random.seed(seeds[r, k])
            m = orders[k]
            mu = mus[k]
            t = 0.0
            n = 0
            while True:
                t += _draw_ph(alphas[k], As[k], exits[k], m)
                if t >= horizon:
                    break
                if n == buf.shape[1]:
                    bigger = np.empty((c, 2 * n))
                    bigger[:, :n] = buf
                    buf = bigger
                buf[k, n] = t
                n += 1
                if mu <= 0.0:
                    break
                t += -math.log(1.0 - np.random.random()) / mu
                if t >= horizon:
                    break
                if n == buf.shape[1]:
                    bigger = np.empty((c, 2 * n))
                    bigger[:, :n] = buf
                    buf = bigger
                buf[k, n] = t
                n += 1
            counts[k] = n
            own = buf[k, :n].copy()
            sign = np.empty(n, dtype=np.int64)
            for e in range(n):
                sign[e] = 1 if e % 2 == 0 else -1
            comp_frac[r, k] = _up_time(own, sign, 1, False, burn, horizon) / span

        total = 0
        for k in range(c):
            total += counts[k]
        # k-way merge of the per-component toggle lists, each already sorted
        times = np.empty(total)
        deltas = np.empty(total, dtype=np.int64)
        heads = np.zeros(c, dtype=np.int64)
        for pos in range(total):
            best = -1
            for k in range(c):
                if heads[k] < counts[k] and (best < 0 or buf[k, heads[k]] < buf[best, heads[best]]):
                    best = k
            e = heads[best]
            times[pos] = buf[best, e]
            deltas[pos] = 1 if e % 2 == 0 else -1
            heads[best] = e + 1
        sys_frac[r] = _up_time(times, deltas, c, parallel, burn, horizon) / span

        for i in range(checkpoints.shape[0]):
            failed = 0
            for k in range(c):
                failed += np.searchsorted(buf[k, :counts[k]], checkpoints[i], side="right") % 2
            up = failed < c if parallel else failed == 0
            point[r, i] = 1.0 if up else 0.0


def _pack(model):
    phs = [lindley_ph(p.lam) if p.law is Law.LINDLEY else exponential_ph(p.lam) for p in model.params]
    c = len(phs)
    m = max(ph.order for ph in phs)
    alphas = np.zeros((c, m))
    As = np.zeros((c, m, m))
    exits = np.zeros((c, m))
    orders = np.zeros(c, dtype=np.int64)
    for k, ph in enumerate(phs):
        o = ph.order
        alphas[k, :o] = ph.alpha
        As[k, :o, :o] = ph.A
        exits[k, :o] = ph.exit_rates
        orders[k] = o
    mus = np.array([p.mu for p in model.params])
    return alphas, As, exits, orders, mus


def _run(packed, parallel, plan, seeds):
    R, c = seeds.shape
    sys_frac = np.zeros(R)
    comp_frac = np.zeros((R, c))
    point = np.zeros((R, plan.checkpoints.size))
    args = (*packed, parallel, plan.horizon, plan.burn_in, np.ascontiguousarray(plan.checkpoints),
            seeds, sys_frac, comp_frac, point)
    if _accel.USE_NUMBA:
        _simulate_kernel(*args)
    else:
        saved = np.random.get_state()
        try:
            _simulate_kernel(*args)
        finally:
            np.random.set_state(saved)
    return sys_frac, comp_frac, point


def _mean_se(x, axis=0):
    n = x.shape[axis]
    mean = x.mean(axis=axis)
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, x.std(axis=axis, ddof=1) / math.sqrt(n)


def simulate(plan: SimulationPlan, workers: int = 1) -> AvailabilityEstimate:
    """Run the plan and summarize replications.

    ``workers > 1`` splits replications over threads (compiled path only);
    results are merged by replication index, so the estimate does not depend
    on scheduling.
    """
    packed = _pack(plan.model)
    parallel = plan.model.structure is Structure.PARALLEL
    seeds = substream_seeds(plan.seed, plan.replications, len(plan.model.components))

    if workers > 1 and _accel.USE_NUMBA and plan.replications > 1:
        chunks = np.array_split(np.arange(plan.replications), min(workers, plan.replications))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda idx: _run(packed, parallel, plan, seeds[idx]), chunks))
        sys_frac = np.concatenate([p[0] for p in parts])
        comp_frac = np.concatenate([p[1] for p in parts])
        point = np.concatenate([p[2] for p in parts])
    else:
        sys_frac, comp_frac, point = _run(packed, parallel, plan, seeds)

    lr, lr_se = _mean_se(sys_frac)
    comp, comp_se = _mean_se(comp_frac)
    pm, pse = _mean_se(point)
    return AvailabilityEstimate(
        checkpoints=plan.checkpoints,
        pointwise_mean=pm,
        pointwise_se=pse,
        long_run=float(lr),
        long_run_se=float(lr_se),
        burn_in=plan.burn_in,
        replications=plan.replications,
        component_long_run=comp,
        component_long_run_se=comp_se,
    )
