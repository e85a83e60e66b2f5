"""One-parameter stationary families of birth-death master equations."""
from .distribution import Distribution, NonpositiveDenominator, NonpositivePivot, PositivityError
from .dynamics import (
    Generator,
    build_generator,
    current_profile,
    evolve,
    max_stable_step,
    null_space_stationary,
    probability_current,
    stationarity_residual,
)
from .riccati import (
    D_INFINITY,
    DParameter,
    FProducts,
    RiccatiSequence,
    distribution_to_riccati,
    f_products,
    max_riccati_residual,
    particular_sequence,
    riccati_general,
    riccati_parametric,
    riccati_particular,
    riccati_residual,
    riccati_to_distribution,
)
from .schedules import (
    RateSchedule,
    ScheduleError,
    check_positivity_condition,
    load_schedule,
    make_asymmetric,
    make_constant,
    make_explicit,
    make_offset_exponential,
    save_schedule,
)
from .ssa import Trajectory, empirical_stationary, gillespie_run, total_variation
from .stationary import (
    asymmetric_closed_form,
    classical_stationary,
    constant_case_closed_form,
    effective_schedule,
    parametric_stationary,
    renormalization_factor,
    renormalization_factors,
)

__version__ = "0.1.0"
