"""Scalars, polynomials, rational maps and forward iteration."""
from .maps import (
    DEFAULT_TOL,
    NATURAL,
    CrashReason,
    DifferenceEquation,
    DomainPolicy,
    OrbitOutcome,
    RationalFunction,
    RationalMap,
    TermBudgetExceeded,
    Unfolding,
    as_equation,
    compose,
    crash_step,
    evaluate,
    iterate,
    iterate_unfolding_symbolic,
    lag_names,
    transport_point,
    unfold,
)
from .mobius import INF, MobiusTransform, mobius_apply, mobius_compose, mobius_inverse
from .poly import Poly, factor_rational, reduce_fraction
from .scalars import (
    COMPLEX,
    REAL,
    QuadNumber,
    Scalar,
    format_scalar,
    gaussian,
    is_exact,
    parse_scalar,
    root_of_unity,
    simplify,
)
from .textformat import (
    EquationDefinition,
    EquationParseError,
    load_definitions,
    parse_definition,
    parse_definitions,
    parse_poly,
)
