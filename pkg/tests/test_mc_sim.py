import json
import os
import subprocess
import sys

import numpy as np
import pytest

from phavail import _accel
from phavail.errors import InvalidPlan
from phavail.lindley import (
    ComponentParams,
    availability_closed,
    reliability_lindley,
    steady_state_exponential,
    steady_state_lindley,
)
from phavail.mc_sim import SimulationPlan, simulate, substream_seeds
from phavail.system import SystemModel, steady_state_parallel

from conftest import cchp_model


def single(lam, mu, law="lindley"):
    return SystemModel("one", "single", [("u", ComponentParams(lam, mu, law))])


def z(est, se, target):
    return abs(est - target) / se


def test_plan_validation():
    m = single(1, 1)
    for kwargs in ({"horizon": 0, "replications": 1}, {"horizon": 10, "replications": 0},
                   {"horizon": 10, "replications": 2.5}, {"horizon": 10, "replications": 1, "seed": -1},
                   {"horizon": 10, "replications": 1, "checkpoints": (2, 1)},
                   {"horizon": 10, "replications": 1, "checkpoints": (11,)},
                   {"horizon": 10, "replications": 1, "burn_in": 10}):
        with pytest.raises(InvalidPlan):
            SimulationPlan(m, **kwargs)
    assert SimulationPlan(m, 100, 3).burn_in == 20.0


def test_substreams_are_prefix_stable():
    a = substream_seeds(42, 5, 3)
    b = substream_seeds(42, 9, 3)
    np.testing.assert_array_equal(a, b[:5])
    assert len(np.unique(b)) == b.size
    assert not np.array_equal(substream_seeds(43, 5, 3), a)


def test_seed_determinism():
    plan = SimulationPlan(cchp_model(), 2000.0, 30, seed=7, checkpoints=(10.0, 500.0))
    a, b = simulate(plan), simulate(plan)
    assert a.long_run == b.long_run
    np.testing.assert_array_equal(a.pointwise_mean, b.pointwise_mean)
    np.testing.assert_array_equal(a.component_long_run, b.component_long_run)
    c = simulate(SimulationPlan(cchp_model(), 2000.0, 30, seed=8))
    assert c.long_run != a.long_run


@pytest.mark.skipif(not _accel.USE_NUMBA, reason="threads only fan out on the compiled path")
def test_workers_do_not_change_result():
    plan = SimulationPlan(cchp_model(), 5000.0, 23, seed=3, checkpoints=(100.0,))
    a, b = simulate(plan), simulate(plan, workers=4)
    assert a.long_run == b.long_run
    np.testing.assert_array_equal(a.component_long_run, b.component_long_run)
    np.testing.assert_array_equal(a.pointwise_mean, b.pointwise_mean)


_SNIPPET = """
import json
from phavail import _accel
from phavail.mc_sim import SimulationPlan, simulate
from phavail.lindley import ComponentParams
from phavail.system import SystemModel
m = SystemModel("cchp", "parallel", [("G", ComponentParams(0.004, 0.03)), ("X", ComponentParams(0.02, 0.1, "exponential"))])
e = simulate(SimulationPlan(m, 3000.0, 12, seed=5, checkpoints=(50.0, 700.0)))
print(json.dumps([_accel.USE_NUMBA, e.long_run, e.component_long_run.tolist(), e.pointwise_mean.tolist()]))
"""


def _run_snippet(disable):
    env = dict(os.environ)
    env["PHAVAIL_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run([sys.executable, "-c", _SNIPPET], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_compiled_and_python_paths_are_identical():
    pytest.importorskip("numba")
    fast, slow = _run_snippet(False), _run_snippet(True)
    assert fast[0] is True and slow[0] is False
    assert fast[1:] == slow[1:]


def test_python_path_restores_global_random_state():
    if _accel.USE_NUMBA:
        pytest.skip("compiled path keeps its own generator state")
    np.random.seed(123)
    before = np.random.random()
    np.random.seed(123)
    simulate(SimulationPlan(single(1, 1), 50.0, 2))
    assert np.random.random() == before


def test_single_lindley_long_run():
    est = simulate(SimulationPlan(single(0.004, 0.03), 1e5, 200, seed=42, burn_in=2e4))
    assert est.burn_in == 2e4
    assert z(est.long_run, est.long_run_se, steady_state_lindley(0.004, 0.03)) < 3


def test_exponential_baseline():
    est = simulate(SimulationPlan(single(0.004, 0.03, "exponential"), 1e5, 200, seed=42))
    assert z(est.long_run, est.long_run_se, steady_state_exponential(0.004, 0.03)) < 3


def test_parallel_long_run():
    model = SystemModel("p", "parallel", [("a", ComponentParams(0.5, 0.4)), ("b", ComponentParams(0.3, 0.2))])
    est = simulate(SimulationPlan(model, 2e4, 100, seed=1))
    assert z(est.long_run, est.long_run_se, steady_state_parallel(model.params)) < 3


def test_no_repair_pointwise_matches_reliability():
    plan = SimulationPlan(single(0.004, 0.0), 300.0, 100_000, seed=42, checkpoints=(250.0,), burn_in=0.0)
    est = simulate(plan)
    assert z(est.pointwise_mean[0], est.pointwise_se[0], reliability_lindley(0.004, 250.0)) < 3


def test_trigonometric_case_pointwise():
    cps = np.linspace(0.5, 5.0, 10)
    est = simulate(SimulationPlan(single(1.0, 1.0), 10.0, 20_000, seed=42, checkpoints=tuple(cps)))
    target = availability_closed(1.0, 1.0, cps)
    assert np.all(np.abs(est.pointwise_mean - target) <= 3 * est.pointwise_se)


def test_estimates_are_probabilities():
    est = simulate(SimulationPlan(cchp_model(), 1000.0, 5, checkpoints=(0.0, 999.0)))
    assert est.pointwise_mean[0] == 1.0 and est.pointwise_se[0] == 0.0
    for v in (est.long_run, *est.component_long_run, *est.pointwise_mean):
        assert 0.0 <= v <= 1.0
    assert est.long_run_se >= 0


def test_single_replication_has_zero_se():
    est = simulate(SimulationPlan(single(1, 1), 100.0, 1))
    assert est.long_run_se == 0.0
