"""Lower and upper expectations for Poisson counting processes with an
interval-valued rate."""

from .errors import (
    ContractViolationError,
    DimensionError,
    ImpoisError,
    InvalidParameterError,
    OracleBudgetError,
    StepTooLargeError,
    ToleranceError,
    UnsupportedFunctionError,
)
from .functions import (
    FunctionSpec,
    GrowthEnvelope,
    Monotonicity,
    constant,
    from_values,
    identity,
    indicator,
    indicator_ge,
    indicator_le,
    parse_function,
    polynomial,
)
from .generator import (
    RateInterval,
    RateSelection,
    WindowFunction,
    apply_lower_generator,
    apply_selected_generator,
    operator_norm,
)
from .imprecise_api import (
    SetKind,
    expectation_bounds,
    expected_count_bounds,
    lower_expectation,
    upper_expectation,
)
from .pois_exact import pmf, poisson_expectation, transition_probability
from .semigroup import (
    ApproxResult,
    BoundResult,
    TimeGrid,
    choose_grid,
    euler_step,
    lower_prevision,
    lower_transition,
    phi_apply,
    upper_prevision,
)

__version__ = "0.1.0"
