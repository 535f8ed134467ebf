"""Exact prime-modulus point sets, exponential-sum verification, and
sparse trigonometric recovery."""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    DegenerateParamsError,
    DegreeTooLargeError,
    DimensionMismatchError,
    FrequencyOutOfBoxError,
    IllConditionedError,
    NotCertifiedError,
    OutOfRangeError,
    PrimePointsError,
    RangeTooLargeError,
    SameEpsilonError,
    ZeroInverseError,
)
from .expsum import (
    ExpSumReport,
    exp_sum,
    polynomial_exp_sum,
    verify_weil_pq,
    verify_weil_pset,
    verify_weil_square,
)
from .numtheory import (
    GoldbachPair,
    Prime,
    goldbach_pairs,
    is_prime,
    mod_inv,
    mod_pow,
    next_prime,
)
from .pointsets import (
    EquivalenceWitness,
    IntersectionProfile,
    PointSet,
    Provenance,
    PSetParams,
    RationalPoint,
    classical_params,
    classical_pset,
    default_pq_partner,
    find_equivalence_witness,
    intersect,
    intersection_profile,
    parameterized_pset,
    pointset_from_json,
    pointset_to_json,
    pq_set,
    qsquare_set,
    rsquare_set,
)
from .quadrature import QmcEstimate, certified_sum_bound, qmc_mean
from .sensing import (
    CoherenceReport,
    RecoverySummary,
    SampleVector,
    SparseTrigPoly,
    coherence,
    coherence_gram_oracle,
    evaluate,
    frequency_box,
    omp_recover,
    random_sparse_poly,
    recovery_experiment,
    sample,
    sampling_matrix,
)

__all__ = [
    "BudgetExceededError",
    "CoherenceReport",
    "DegenerateParamsError",
    "DegreeTooLargeError",
    "DimensionMismatchError",
    "EquivalenceWitness",
    "ExpSumReport",
    "FrequencyOutOfBoxError",
    "GoldbachPair",
    "IllConditionedError",
    "IntersectionProfile",
    "NotCertifiedError",
    "OutOfRangeError",
    "PointSet",
    "Prime",
    "PrimePointsError",
    "Provenance",
    "PSetParams",
    "QmcEstimate",
    "RangeTooLargeError",
    "RationalPoint",
    "RecoverySummary",
    "SameEpsilonError",
    "SampleVector",
    "SparseTrigPoly",
    "ZeroInverseError",
    "certified_sum_bound",
    "classical_params",
    "classical_pset",
    "coherence",
    "coherence_gram_oracle",
    "default_pq_partner",
    "evaluate",
    "exp_sum",
    "find_equivalence_witness",
    "frequency_box",
    "goldbach_pairs",
    "intersect",
    "intersection_profile",
    "is_prime",
    "mod_inv",
    "mod_pow",
    "next_prime",
    "omp_recover",
    "parameterized_pset",
    "pointset_from_json",
    "pointset_to_json",
    "polynomial_exp_sum",
    "pq_set",
    "qmc_mean",
    "qsquare_set",
    "random_sparse_poly",
    "recovery_experiment",
    "rsquare_set",
    "sample",
    "sampling_matrix",
    "verify_weil_pq",
    "verify_weil_pset",
    "verify_weil_square",
]
