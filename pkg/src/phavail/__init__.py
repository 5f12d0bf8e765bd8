"""Availability of repairable systems with Lindley (phase-type) failure times."""

from .ctmc import (
    GeneratorMatrix,
    StateDistribution,
    expm_action,
    stationary_distribution,
    transient_curve,
    transient_distribution,
    validate_generator,
)
from .lindley import (
    ComponentParams,
    Law,
    availability_closed,
    availability_exponential_closed,
    availability_numeric,
    build_single_component_generator,
    dA_dlambda,
    dA_dmu,
    mttf_lindley,
    mttr,
    reliability_lindley,
    steady_state_availability,
)
from .mc_sim import AvailabilityEstimate, SimulationPlan, simulate
from .phase_type import (
    PhaseTypeDistribution,
    lindley_ph,
    lindley_survival_closed,
    ph_mean,
    ph_sample,
    ph_survival,
)
from .system import (
    AvailabilityCurve,
    Structure,
    SystemModel,
    product_space_generator,
    steady_state_parallel,
    steady_state_series,
    system_availability_curve,
)

__version__ = "0.1.0"
