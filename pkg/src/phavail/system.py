"""Series and parallel systems of independent repairable components.

Each component has its own repairman, so component processes are independent
and the joint chain is the Kronecker sum of the component generators.  The
product-space chain is only built for small systems, as a check on the
product formulas.
"""

import enum
import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .ctmc import GeneratorMatrix, StateDistribution, validate_generator
from .errors import EmptySystem, NonPositiveRate, PhavailError, TooManyComponents
from .lindley import (
    ComponentParams,
    Law,
    availability_closed,
    availability_exponential_closed,
    component_generator,
    initial_distribution,
    steady_state_availability,
)

MAX_PRODUCT_COMPONENTS = 4

LINDLEY_PHASES = ("E0", "G0", "G1", "F")
EXPONENTIAL_PHASES = ("U", "F")


class Structure(str, enum.Enum):
    SINGLE = "single"
    SERIES = "series"
    PARALLEL = "parallel"


class Component(NamedTuple):
    label: str
    params: ComponentParams


@dataclass(frozen=True)
class SystemModel:
    name: str
    structure: Structure
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "structure", Structure(self.structure))
        comps = tuple(c if isinstance(c, Component) else Component(*c) for c in self.components)
        if not comps:
            raise EmptySystem("a system needs at least one component")
        if self.structure is Structure.SINGLE and len(comps) != 1:
            raise PhavailError(f"a single-structure model takes exactly one component, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    @property
    def params(self) -> list:
        return [c.params for c in self.components]

    @property
    def labels(self) -> list:
        return [c.label for c in self.components]


@dataclass(frozen=True)
class StateClassification:
    up: np.ndarray
    down: np.ndarray


@dataclass(frozen=True, eq=False)
class ProductSpace:
    generator: GeneratorMatrix
    initial: StateDistribution
    series: StateClassification
    parallel: StateClassification
    states: tuple
    failures: np.ndarray


@dataclass(frozen=True, eq=False)
class AvailabilityCurve:
    times: np.ndarray
    values: np.ndarray
    provenance: str
    label: str = ""


def _checked(components, need_repair=True):
    comps = list(components)
    if not comps:
        raise EmptySystem("no components given")
    for c in comps:
        if need_repair and c.mu <= 0:
            raise NonPositiveRate("mu", c.mu)
    return comps


def steady_state_series(components: Sequence[ComponentParams]) -> float:
    """Long-run availability of components in series: the product of their own."""
    return float(np.prod([steady_state_availability(c) for c in _checked(components)]))


def steady_state_parallel(components: Sequence[ComponentParams]) -> float:
    """Long-run availability of a parallel group: one minus the product of unavailabilities."""
    return 1.0 - float(np.prod([1.0 - steady_state_availability(c) for c in _checked(components)]))


def component_curve(p: ComponentParams, times):
    if p.law is Law.EXPONENTIAL:
        return availability_exponential_closed(p.lam, p.mu, times)
    return availability_closed(p.lam, p.mu, times)


def combine(structure, curves):
    """Combine per-component availabilities (stacked on axis 0) by structure."""
    curves = np.asarray(curves, dtype=float)
    if Structure(structure) is Structure.PARALLEL:
        return 1.0 - np.prod(1.0 - curves, axis=0)
    return np.prod(curves, axis=0)


def system_availability_curve(model: SystemModel, grid) -> AvailabilityCurve:
    """Time-dependent system availability under component independence."""
    times = np.asarray(grid, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) < 0):
        raise PhavailError("time grid must be a non-decreasing 1-D sequence")
    curves = [np.atleast_1d(component_curve(p, times)) for p in model.params]
    return AvailabilityCurve(times, combine(model.structure, curves), "closed-form", model.name)


def product_space_generator(components: Sequence[ComponentParams]) -> ProductSpace:
    """Joint chain of independent components as a Kronecker sum.

    States are ordered lexicographically by (unit 1 phase, unit 2 phase, ...),
    with Lindley phases (E0, G0, G1, F) and exponential phases (U, F).
    """
    comps = _checked(components, need_repair=False)
    if len(comps) > MAX_PRODUCT_COMPONENTS:
        raise TooManyComponents(f"product space supports at most {MAX_PRODUCT_COMPONENTS} components, got {len(comps)}")
    gens = [component_generator(c).rates for c in comps]
    inits = [initial_distribution(c).probs for c in comps]
    phases = [EXPONENTIAL_PHASES if c.law is Law.EXPONENTIAL else LINDLEY_PHASES for c in comps]

    Q = np.array(gens[0])
    p0 = inits[0]
    for g, p in zip(gens[1:], inits[1:]):
        Q = np.kron(Q, np.eye(g.shape[0])) + np.kron(np.eye(Q.shape[0]), g)
        p0 = np.kron(p0, p)
    # the Kronecker sum is a generator by construction; rebuild the diagonal exactly
    np.fill_diagonal(Q, 0.0)
    np.fill_diagonal(Q, -Q.sum(axis=1))

    states = tuple(itertools.product(*phases))
    failures = np.array([sum(ph == "F" for ph in s) for s in states])
    n = len(comps)
    idx = np.arange(len(states))
    series = StateClassification(idx[failures == 0], idx[failures > 0])
    parallel = StateClassification(idx[failures < n], idx[failures == n])
    return ProductSpace(validate_generator(Q), StateDistribution(p0), series, parallel, states, failures)
