"""Absolute matrix summability: normal-matrix transforms, summability
indices, hypothesis checkers for summability-factor theorems, and the
summation-by-parts split of the transformed factored series."""

__version__ = "0.1.0"

from ._validation import DomainError
from .seqcore import (
    GrowthWitness,
    RealSequence,
    WeightSequence,
    almost_increasing_witness,
    forward_diff,
    growth_witness,
    partial_sums,
    weight_partials,
)
from .matrices import (
    DerivedMatrices,
    NormalMatrix,
    cesaro_matrix,
    check_matrix_conditions,
    custom_matrix,
    derive,
    identity_matrix,
    weighted_mean_matrix,
)
from .summability import (
    IndexSeries,
    cesaro_coeff,
    cesaro_mean,
    convergence_diagnostic,
    riesz_mean,
    summability_index,
)
from .conditions import FactorSystem, check_hypotheses, factor_system
from .decomposition import abel_split, abel_splits, factored_terms, term_index_partials
from .estimators import AbsoluteSummabilityIndex, MatrixMeanTransformer

__all__ = [
    "AbsoluteSummabilityIndex",
    "DerivedMatrices",
    "DomainError",
    "FactorSystem",
    "GrowthWitness",
    "IndexSeries",
    "MatrixMeanTransformer",
    "NormalMatrix",
    "RealSequence",
    "WeightSequence",
    "abel_split",
    "abel_splits",
    "almost_increasing_witness",
    "cesaro_coeff",
    "cesaro_matrix",
    "cesaro_mean",
    "check_hypotheses",
    "check_matrix_conditions",
    "convergence_diagnostic",
    "custom_matrix",
    "derive",
    "factor_system",
    "factored_terms",
    "forward_diff",
    "growth_witness",
    "identity_matrix",
    "partial_sums",
    "riesz_mean",
    "summability_index",
    "term_index_partials",
    "weight_partials",
    "weighted_mean_matrix",
]
