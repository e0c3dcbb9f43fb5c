"""Exact tropical theta functions over the rationals.

Polarized tropical abelian varieties, min-plus theta series with complete
witness sets, their corner-locus divisors as polyhedral complexes, and a
non-Archimedean layer (Puiseux coefficients) whose tropicalizations are
cross-checked against the intrinsic constructions.  Everything is Fraction
arithmetic; no floats enter any result.
"""

from .varieties import (
    InvalidDataError,
    TropicalPolarizationData,
    ValidityReport,
    dual,
    embed_M_dual,
    embed_Mprime,
    polarization_map,
    reduce_mod_lattice,
    require_valid,
    validate,
)
from .lattice import (
    NotPositiveDefiniteError,
    QuadraticMinimum,
    enumerate_below,
    lll_reduce,
    minimize_quadratic,
)
from .theta import (
    AutomorphyFactor,
    EvalResult,
    NotPrincipalError,
    PeriodicPLFunction,
    TropicalThetaExpression,
    TropicalThetaFunction,
    ValuationProfile,
    default_shifts,
    difference_to_periodic,
    is_even,
    kummer_check,
    level_n_function,
    riemann_theta,
    verify_transformation,
)
from .puiseux import PuiseuxNumber
from .nonarch import (
    CocycleMismatchError,
    NACocycle,
    NARationalFunction,
    NAThetaFunction,
    NotAmpleError,
    PeriodMatrix,
    build_riemann_theta,
    canonical_cocycle,
    construct_rational_function,
    evaluate_at_point,
    theta_basis,
    tropicalize,
    verify_cocycle,
)
from .geometry import (
    CellComplex,
    FundamentalDomain,
    LinearityCell,
    OnCornerLocusError,
    QuotientSummary,
    RankTooLargeError,
    SkeletonPiece,
    UnsupportedFormatError,
    corner_locus,
    export_mesh,
    linearity_cell,
)
from .crosschecks import (
    CheckOutcome,
    sample_points,
    sample_shifts,
    seeded_period,
    suite_a,
    suite_b,
    suite_c,
)

__all__ = [
    "AutomorphyFactor",
    "CellComplex",
    "CheckOutcome",
    "CocycleMismatchError",
    "EvalResult",
    "FundamentalDomain",
    "InvalidDataError",
    "LinearityCell",
    "NACocycle",
    "NARationalFunction",
    "NAThetaFunction",
    "NotAmpleError",
    "NotPositiveDefiniteError",
    "NotPrincipalError",
    "OnCornerLocusError",
    "PeriodMatrix",
    "PeriodicPLFunction",
    "PuiseuxNumber",
    "QuadraticMinimum",
    "QuotientSummary",
    "RankTooLargeError",
    "SkeletonPiece",
    "TropicalPolarizationData",
    "TropicalThetaExpression",
    "TropicalThetaFunction",
    "UnsupportedFormatError",
    "ValidityReport",
    "ValuationProfile",
    "build_riemann_theta",
    "canonical_cocycle",
    "construct_rational_function",
    "corner_locus",
    "default_shifts",
    "difference_to_periodic",
    "dual",
    "embed_M_dual",
    "embed_Mprime",
    "enumerate_below",
    "evaluate_at_point",
    "export_mesh",
    "is_even",
    "kummer_check",
    "level_n_function",
    "linearity_cell",
    "lll_reduce",
    "minimize_quadratic",
    "polarization_map",
    "reduce_mod_lattice",
    "require_valid",
    "riemann_theta",
    "sample_points",
    "sample_shifts",
    "seeded_period",
    "suite_a",
    "suite_b",
    "suite_c",
    "theta_basis",
    "tropicalize",
    "validate",
    "verify_cocycle",
    "verify_transformation",
]

__version__ = "0.1.0"
