"""Deterministic epidemic dynamics of segmented file-sharing swarms.

Simulation, equilibrium analysis and dissemination-control optimisation
for compartment models of a single swarm: the two-segment system with
pluggable seeding controllers, its one-segment reduction, and the lumped
rare-segment variants with one or two uplink classes.
"""

from .control import (
    BangBang,
    Constant,
    ContinuousRarest,
    ControlledRarity,
    ControlPolicy,
    Inverted,
    control_value,
)
from .engine import (
    IntegrationError,
    IntegratorConfig,
    NegativityViolation,
    NonFiniteState,
    NotConvergedError,
    PhaseField,
    StepSizeUnderflow,
    Trajectory,
    find_steady_state,
    integrate,
    phase_field,
)
from .equilibria import (
    DiscriminantParams,
    EquilibriumSet,
    OutOfRegimeWarning,
    SingularDenominator,
    StabilityInfo,
    continuous_control_equilibria,
    discriminant_lambda_bounds,
    half_control_equilibrium,
    littles_sojourn,
    quad_positive_root,
    quartic_coeffs,
    u1_equilibrium,
    xa_from_xb,
    xl_xs_from_xab,
)
from .lumped import (
    AsymmetricRates,
    ClassRates,
    LumpedParams,
    LumpedState,
    SweepPoint,
    TwoClassParams,
    TwoClassState,
    lumped_field,
    lumped_rhs,
    lumped_symmetric_equilibrium,
    sweep_delay_vs_u,
    two_class_field,
    two_class_rhs,
)
from .mayer import (
    OCProblem,
    OCSolution,
    OptimizerConfig,
    evaluate_objective,
    solve_mayer,
)
from .model import (
    ParameterOrderingWarning,
    SeederLifetimeParams,
    SwarmParams,
    SwarmState,
    effective_death_rate,
    one_segment_equilibrium,
    one_segment_field,
    one_segment_rhs,
    two_segment_field,
    two_segment_rhs,
)
from .quartic import (
    DegenerateQuartic,
    QuarticInvariants,
    quartic_invariants,
    solve_quartic,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # control
    "ControlPolicy",
    "Constant",
    "ContinuousRarest",
    "BangBang",
    "ControlledRarity",
    "Inverted",
    "control_value",
    # models
    "ParameterOrderingWarning",
    "SwarmParams",
    "SwarmState",
    "SeederLifetimeParams",
    "two_segment_rhs",
    "two_segment_field",
    "one_segment_rhs",
    "one_segment_field",
    "one_segment_equilibrium",
    "effective_death_rate",
    # engine
    "IntegrationError",
    "StepSizeUnderflow",
    "NegativityViolation",
    "NonFiniteState",
    "NotConvergedError",
    "IntegratorConfig",
    "Trajectory",
    "integrate",
    "find_steady_state",
    "PhaseField",
    "phase_field",
    # equilibria
    "SingularDenominator",
    "OutOfRegimeWarning",
    "DiscriminantParams",
    "StabilityInfo",
    "EquilibriumSet",
    "half_control_equilibrium",
    "u1_equilibrium",
    "xl_xs_from_xab",
    "xa_from_xb",
    "quad_positive_root",
    "quartic_coeffs",
    "discriminant_lambda_bounds",
    "continuous_control_equilibria",
    "littles_sojourn",
    # quartic
    "DegenerateQuartic",
    "QuarticInvariants",
    "quartic_invariants",
    "solve_quartic",
    # lumped / two-class
    "AsymmetricRates",
    "LumpedParams",
    "LumpedState",
    "ClassRates",
    "TwoClassParams",
    "TwoClassState",
    "lumped_rhs",
    "lumped_field",
    "lumped_symmetric_equilibrium",
    "two_class_rhs",
    "two_class_field",
    "SweepPoint",
    "sweep_delay_vs_u",
    # optimal control
    "OCProblem",
    "OCSolution",
    "OptimizerConfig",
    "evaluate_objective",
    "solve_mayer",
]
