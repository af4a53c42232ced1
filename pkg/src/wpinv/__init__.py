"""Weighted Moore-Penrose and group inverses, weighted-EP matrices and
Banach-algebra hermiticity tests for square complex matrices."""

from .ep import (
    Clause,
    ClauseParams,
    ClauseReport,
    characterization_battery,
    commutant_probe,
    invertible_factor_witness,
    is_weighted_ep,
    spectral_pinv_witness,
)
from .estimators import GroupInverse, WeightedEPCharacterization, WeightedPinv
from .exceptions import (
    ConvergenceFailure,
    CriterionMismatch,
    Defective,
    DimensionMismatch,
    InconsistentProjectors,
    NoSolution,
    NotHermitian,
    NotInvariant,
    NotPositiveDefinite,
    PreconditionUnmet,
    SingularCore,
    VerificationFailure,
    WitnessFailure,
    WpinvError,
)
from .geninv import (
    GroupInvResult,
    Weight,
    WeightedPinvResult,
    full_rank_factorization,
    group_inverse,
    penrose_residuals,
    pinv_from_projectors,
    projectors_of,
    reverse_weights_identity_check,
    weighted_pinv,
)
from .hermitian import (
    HermitianReport,
    field_of_values_sample,
    is_banach_hermitian,
    is_positive,
    is_weighted_hermitian,
    weighted_norm,
)
from .linalg import (
    NormKind,
    eig,
    induced_norm,
    matrix_exp,
    principal_sqrt_hpd,
    rank,
    svd_pinv,
)
from .structure import (
    BlockModel,
    left_mult_lift,
    verify_lift_theorem,
    verify_quotient_theorem,
    verify_restriction_theorem,
)

__version__ = "0.1.0"
