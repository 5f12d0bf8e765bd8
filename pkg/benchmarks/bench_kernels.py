"""Compare the numba kernels against their pure-Python/numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]

Uniformization kernels are timed in-process side by side.  The Monte Carlo
loop is timed in two interpreters, one with PHAVAIL_DISABLE_NUMBA=1, because
the fallback must not call into compiled helpers.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from phavail import _accel, ctmc
from phavail.lindley import ComponentParams
from phavail.system import product_space_generator


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def uniformization_case(n_components, t_stop, points):
    space = product_space_generator([ComponentParams(0.004, 0.03), ComponentParams(0.002, 0.08),
                                     ComponentParams(0.002, 0.08), ComponentParams(0.01, 0.2)][:n_components])
    Q = space.generator.rates
    n = Q.shape[0]
    r = ctmc.UNIFORMIZATION_FACTOR * float(np.max(-np.diag(Q)))
    P = np.ascontiguousarray(np.eye(n) + Q / r)
    wins = [ctmc.poisson_window(r * t) for t in np.linspace(0, t_stop, points)]
    starts = np.array([s for s, _ in wins], dtype=np.int64)
    lengths = np.array([w.size for _, w in wins], dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(lengths)[:-1])).astype(np.int64)
    weights = np.concatenate([w for _, w in wins])
    args = (P, space.initial.probs.copy(), starts, starts + lengths, offsets, weights)
    return n, int((starts + lengths).max()), args


def bench_uniformization(repeat):
    print("uniformization  (states, powers, grid points)")
    for comps, t_stop, points in ((1, 500.0, 501), (2, 500.0, 501), (3, 2000.0, 201), (4, 2000.0, 201)):
        n, kmax, args = uniformization_case(comps, t_stop, points)
        out_a = np.zeros((points, n))
        out_b = np.zeros((points, n))
        ctmc._accumulate_loops(*args, out_a)  # compile / warm up
        t_fast = best_of(lambda: ctmc._accumulate_loops(*args, np.zeros((points, n))), repeat)
        t_numpy = best_of(lambda: ctmc._accumulate_numpy(*args, np.zeros((points, n))), repeat)
        ctmc._accumulate_numpy(*args, out_b)
        diff = float(np.max(np.abs(out_a - out_b)))
        label = "numba" if _accel.USE_NUMBA else "loops"
        print(f"  ({n:3d}, {kmax:5d}, {points:4d})  {label} {t_fast * 1e3:9.2f} ms   numpy {t_numpy * 1e3:9.2f} ms"
              f"   speedup {t_numpy / t_fast:6.1f}x   max|diff| {diff:.1e}")


_MC_SNIPPET = """
import json, sys, time
from phavail import _accel
from phavail.config import read_model_config
from phavail.lindley import ComponentParams
from phavail.mc_sim import SimulationPlan, simulate
from phavail.system import SystemModel
name, reps, horizon, repeat = sys.argv[1], int(sys.argv[2]), float(sys.argv[3]), int(sys.argv[4])
if name == "cchp":
    model = read_model_config("cchp.json").model
else:
    model = SystemModel("one", "single", [("u", ComponentParams(1.0, 1.0))])
plan = SimulationPlan(model, horizon, reps, seed=42, checkpoints=(1.0, 10.0))
est = simulate(plan)  # warm up / compile
best = float("inf")
for _ in range(repeat):
    t0 = time.perf_counter()
    est = simulate(plan)
    best = min(best, time.perf_counter() - t0)
print(json.dumps([_accel.USE_NUMBA, best, est.long_run, est.pointwise_mean.tolist()]))
"""


def _mc_run(disable, name, reps, horizon, repeat):
    env = dict(os.environ, PHAVAIL_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", _MC_SNIPPET, name, str(reps), str(horizon), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def bench_monte_carlo(repeat, reps, horizon):
    # each path runs in its own interpreter, exactly as PHAVAIL_DISABLE_NUMBA selects it
    print(f"Monte Carlo  ({reps} replications, horizon {horizon:g} d, full simulate())")
    for name, label in (("cchp", "cchp series"), ("single", "single (1, 1)")):
        fast = _mc_run(False, name, reps, horizon, repeat)
        slow = _mc_run(True, name, reps, horizon, 1)
        same = fast[2:] == slow[2:]
        print(f"  {label:14s}  numba {fast[1]:8.3f} s   python {slow[1]:8.3f} s   "
              f"speedup {slow[1] / fast[1]:6.1f}x   identical {same}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--horizon", type=float, default=1e4)
    args = ap.parse_args()
    print(f"numba enabled: {_accel.USE_NUMBA}")
    bench_uniformization(args.repeat)
    bench_monte_carlo(args.repeat, args.reps, args.horizon)


if __name__ == "__main__":
    main()
