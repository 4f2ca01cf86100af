"""Changes of variables, invariants and the catalog of reducible families."""
from .changes import (
    ChangeOfVariables,
    affine_shift,
    mobius_pointwise,
    parse_change,
    product_lags,
    product_pair,
    quotient,
    quotient_lag,
    reciprocal_shift,
)
from .core import (
    NoMatch,
    ReductionResult,
    SemiconjugacyReport,
    check_orbit,
    pullback_fs,
    reduce,
    reduction_for,
    verify_semiconjugacy,
)
from .families import FamilyInstance, FamilyTemplate, build_family, family, load_families
from .invariants import (
    InvariantForm,
    SingularInit,
    aghajani_form,
    aghajani_fs,
    invariant_constant,
    invariant_reduce,
    palladino_form,
)
from .shojaei import DegenerateFs, scalar_root_order, shojaei_fs
from .transport import (
    mobius_product_family,
    mobius_transport,
    rhouma_linear,
    rhouma_multiplicative,
    rhouma_riccati,
    transport_form,
    transport_fs,
)
