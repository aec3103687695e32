"""Python access to the answerability toolkit."""

from ._core import (
    Error,
    ValidationError,
    case_fold,
    chi_square_2x2,
    fit_lda,
    generate_synthetic,
    information_gain_2x2,
    lcs_length,
    load_features,
    metrics,
    planted_feature_names,
    pos_diversity,
    rank_features,
    roc_area,
    rouge_lcs_recall,
    run_experiment,
    stratified_folds,
    tokenize,
    topic_diversity,
)

__all__ = [
    "Error",
    "ValidationError",
    "case_fold",
    "chi_square_2x2",
    "fit_lda",
    "generate_synthetic",
    "information_gain_2x2",
    "lcs_length",
    "load_features",
    "metrics",
    "planted_feature_names",
    "pos_diversity",
    "rank_features",
    "roc_area",
    "rouge_lcs_recall",
    "run_experiment",
    "stratified_folds",
    "tokenize",
    "topic_diversity",
]
