"""Randomized gradient boosting over tree stumps, with its verification toolkit.

The training core draws a random candidate set of weak-learners each round and
greedily picks the best within it (random-then-greedy). The surrounding
modules expose the machinery that makes the procedure analyzable: the exact
selection law and its Beta limit, the structured norms matched to each
selection rule with their duals, minimal-cosine-angle geometry, and the
linear-rate bound.
"""

from .boosting import (
    IterationRecord,
    StepRule,
    StumpModel,
    TrainResult,
    load_model,
    predict,
    rate_bound,
    save_model,
    train_rgbm,
    train_rtgcd,
)
from .datasets import (
    Dataset,
    LibsvmFormatError,
    SplitCandidates,
    feature_quantiles,
    load_libsvm,
    parse_libsvm,
    to_binary_labels,
    train_test_split,
    write_libsvm,
)
from .estimators import RGBMClassifier, RGBMRegressor
from .geometry import (
    McaEstimate,
    binary_basis,
    dist_between,
    dist_estimate,
    kernel_basis,
    mca_binary_infinity,
    mca_estimate,
    mca_orthogonal_infinity,
    mca_orthogonal_ordered,
)
from .losses import (
    ExponentialLoss,
    HuberLoss,
    LineSearchResult,
    LogisticLoss,
    Loss,
    SquaredLoss,
    line_search,
    make_loss,
    objective,
    pseudo_residual,
)
from .norms import (
    GroupNorm,
    InfinityNorm,
    OrderedL1Norm,
    OrderedMixedNorm,
    exact_rtg_expectation,
    norm_for_rule,
)
from .sampling import (
    Candidates,
    SelectionRule,
    beta_limit_pdf,
    enumerate_selection_pmf,
    rtg_pick,
    sample_candidates,
    selection_pmf,
    selection_pmf_exact,
)
from .stumps import CandidateBest, DenseBasis, StumpBasis, build_stump_basis

__version__ = "0.1.0"

__all__ = [
    "CandidateBest",
    "Candidates",
    "Dataset",
    "DenseBasis",
    "ExponentialLoss",
    "GroupNorm",
    "HuberLoss",
    "InfinityNorm",
    "IterationRecord",
    "LibsvmFormatError",
    "LineSearchResult",
    "LogisticLoss",
    "Loss",
    "McaEstimate",
    "OrderedL1Norm",
    "OrderedMixedNorm",
    "RGBMClassifier",
    "RGBMRegressor",
    "SelectionRule",
    "SplitCandidates",
    "SquaredLoss",
    "StepRule",
    "StumpBasis",
    "StumpModel",
    "TrainResult",
    "beta_limit_pdf",
    "binary_basis",
    "build_stump_basis",
    "dist_between",
    "dist_estimate",
    "enumerate_selection_pmf",
    "exact_rtg_expectation",
    "feature_quantiles",
    "kernel_basis",
    "line_search",
    "load_libsvm",
    "load_model",
    "make_loss",
    "mca_binary_infinity",
    "mca_estimate",
    "mca_orthogonal_infinity",
    "mca_orthogonal_ordered",
    "norm_for_rule",
    "objective",
    "parse_libsvm",
    "predict",
    "pseudo_residual",
    "rate_bound",
    "rtg_pick",
    "sample_candidates",
    "save_model",
    "selection_pmf",
    "selection_pmf_exact",
    "to_binary_labels",
    "train_rgbm",
    "train_rtgcd",
    "train_test_split",
    "write_libsvm",
]
