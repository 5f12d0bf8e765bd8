"""End-to-end cross-checks of the closed forms against independent routes."""

from dataclasses import dataclass

import numpy as np

from .ctmc import stationary_distribution, transient_curve
from .lindley import (
    Law,
    availability_closed,
    availability_exponential_closed,
    build_exponential_generator,
    build_single_component_generator,
    initial_distribution,
    steady_state_availability,
)
from .mc_sim import SimulationPlan, simulate
from .report import ReportTable
from .system import MAX_PRODUCT_COMPONENTS, Structure, SystemModel, product_space_generator, steady_state_parallel, steady_state_series

CLOSED_FORM_TOL = 1e-8
STEADY_TOL = 1e-10
MC_SIGMAS = 3.0


@dataclass
class Check:
    name: str
    deviation: float
    tolerance: float
    status: str  # PASS | FAIL | SKIP
    detail: str = ""


def _check(name, deviation, tolerance, detail=""):
    ok = bool(np.isfinite(deviation) and deviation <= tolerance)
    return Check(name, float(deviation), float(tolerance), "PASS" if ok else "FAIL", detail)


def run_verification(model: SystemModel, *, tol=CLOSED_FORM_TOL, seed=42, replications=200,
                     horizon=1e5, grid=None, closed_form=availability_closed, workers=1):
    """Return the list of :class:`Check` results for ``model``.

    ``closed_form`` replaces the Lindley closed-form availability; it exists
    so tests can feed in a deliberately wrong formula.
    """
    grid = np.geomspace(1e-3, 1e4, 200) if grid is None else np.asarray(grid, dtype=float)
    checks = []

    for c in model.components:
        p = c.params
        if p.law is Law.EXPONENTIAL:
            closed = np.atleast_1d(availability_exponential_closed(p.lam, p.mu, grid))
            Q = build_exponential_generator(p)
            down = 1
        else:
            closed = np.atleast_1d(closed_form(p.lam, p.mu, grid))
            Q = build_single_component_generator(p)
            down = 3
        numeric = 1.0 - transient_curve(Q, initial_distribution(p), grid)[:, down]
        checks.append(_check(f"closed-form vs CTMC transient [{c.label}]",
                             np.max(np.abs(closed - numeric)), tol))

        pi = stationary_distribution(Q).probs
        checks.append(_check(f"steady-state formula vs stationary solve [{c.label}]",
                             abs(steady_state_availability(p) - (1.0 - pi[down])), STEADY_TOL))

    repairable = all(p.mu > 0 for p in model.params)
    structure = Structure.SERIES if model.structure is Structure.SINGLE else model.structure
    formula = steady_state_parallel if structure is Structure.PARALLEL else steady_state_series
    name = f"system {structure.value} formula vs product-space stationary solve"
    if not repairable:
        checks.append(Check(name, float("nan"), STEADY_TOL, "SKIP", "needs mu > 0 for every component"))
    elif len(model.components) > MAX_PRODUCT_COMPONENTS:
        checks.append(Check(name, float("nan"), STEADY_TOL, "SKIP",
                            f"more than {MAX_PRODUCT_COMPONENTS} components"))
    else:
        space = product_space_generator(model.params)
        pi = stationary_distribution(space.generator).probs
        cls = space.parallel if structure is Structure.PARALLEL else space.series
        checks.append(_check(name, abs(formula(model.params) - pi[cls.up].sum()), STEADY_TOL))

    plan = SimulationPlan(model, horizon, replications, seed)
    est = simulate(plan, workers=workers)
    for k, c in enumerate(model.components):
        target = steady_state_availability(c.params)
        se = est.component_long_run_se[k]
        checks.append(_check(f"Monte Carlo long-run within {MC_SIGMAS:g} SE [{c.label}]",
                             abs(est.component_long_run[k] - target), MC_SIGMAS * se,
                             f"estimate {est.component_long_run[k]:.6f} +/- {se:.6f}"))
    if repairable:
        target = formula(model.params)
        checks.append(_check(f"Monte Carlo long-run within {MC_SIGMAS:g} SE [system]",
                             abs(est.long_run - target), MC_SIGMAS * est.long_run_se,
                             f"estimate {est.long_run:.6f} +/- {est.long_run_se:.6f}"))
    return checks


def checks_table(model: SystemModel, checks) -> ReportTable:
    rows = [[ch.name, f"{ch.deviation:.3e}", f"{ch.tolerance:.3e}", ch.status] for ch in checks]
    footer = [f"  {ch.name}: {ch.detail}" for ch in checks if ch.detail]
    counts = {s: sum(ch.status == s for ch in checks) for s in ("PASS", "FAIL", "SKIP")}
    footer.append("passed {PASS}, failed {FAIL}, skipped {SKIP}".format(**counts))
    return ReportTable(
        title=f"Verification: {model.name}",
        headers=["check", "max_deviation", "tolerance", "verdict"],
        rows=rows,
        note="closed forms vs CTMC transient/stationary solves vs Monte Carlo",
        footer=footer,
    )
