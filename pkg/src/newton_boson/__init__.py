"""Newton-series (finite-difference) expansions of bosonic number-operator functions."""

from .errors import (
    CutoffError,
    DivergenceError,
    DivisionByZeroError,
    DomainError,
    InternalConsistencyError,
    NewtonBosonError,
    NonConvergenceError,
    ParseError,
    PoleError,
    PrecisionError,
    TailError,
    UnboundIdentifierError,
)
from .findiff import (
    DEFAULT_PRECISION,
    NewtonSeries,
    ScalarFunction,
    falling_factorial,
    forward_difference,
    negative_power_series,
    newton_coefficients,
    newton_partial_sum,
)
from .fock import (
    FockOperator,
    FockSpace,
    diagonal_operator,
    generating_function,
    kfold_commutator,
    ladder_operators,
    normal_ordered_operator,
    operator_exp,
)
from .spinrep import (
    SpinOperators,
    SpinRep,
    commutator_residual,
    exact_spin_matrices,
    hp_newton_coefficients,
    hp_taylor_coefficients,
    spin_operators,
)
from .coherent import (
    CoherentParams,
    CoherentState,
    ThermalParams,
    coherent_expectation,
    coherent_vector,
    displaced_operator,
    displacement_operator,
    husimi,
    thermal_density_coefficients,
)
from .counting import (
    DiscreteDistribution,
    MomentSet,
    convert_moments,
    cumulants_from_moments,
    factorial_moments,
    operator_identity_check,
    raw_moments,
    reconstruct_probability,
)
from .notransform import (
    BernoulliCache,
    TransformPair,
    bernoulli_numbers,
    bose_laurent_series,
    factorial_power_gamma,
    inverse_transform_by_coefficients,
    transform_by_coefficients,
    transform_pair,
    transform_quadrature,
    zeta_newton_series,
)
from .expr import compile_function, evaluate, parse_expression, to_text

__version__ = "0.1.0"
