"""rankderiv: exact rank factorizations and derivation-style maps on matrix
rings over Q, prime fields, and rational function fields."""

from ._backend import BACKEND
from .errors import (
    DomainError,
    ExtractionError,
    PreconditionError,
    RankderivError,
    ResourceLimitError,
    UsageError,
)
from .fields import (
    Field,
    FieldDerivation,
    PrimeField,
    Rationals,
    RationalFunctionField,
    derive,
    eval_arith,
    inv,
    parse_field,
)
from .matrix import (
    Matrix,
    RankNormalForm,
    enumerate_all,
    enumerate_rank_k,
    mat_arith,
    random_rank_k,
    rank_count_formula,
)
from .factor import (
    AdaptedFactorization,
    RankSFactorization,
    adapted_factor,
    cover_rank,
    factor_rank_s,
    rank_set,
)
from .derivations import (
    CanonicalDerivation,
    DeltaDomain,
    DeltaMap,
    apply_derivation,
    check_linear_combination,
    derivation_delta,
    extend_to_low_ranks,
    extract_derivation,
    make_delta,
    reconstruct_full,
    verify_hypothesis,
)
from .solver import build_constraint_system, rank_count, solution_space

__version__ = "0.1.0"
