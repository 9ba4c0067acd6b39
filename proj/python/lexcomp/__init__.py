"""Lexical complexity analysis: agreement, resources, permutation tests and models."""

from ._lexcomp import (
    ComputationError,
    Error,
    FrequencyTable,
    Instance,
    InputError,
    LogisticModel,
    PermutationResult,
    RatingMatrix,
    RidgeModel,
    SteigerResult,
    UsageError,
    cwi_label,
    group_majority,
    group_mean,
    krippendorff_alpha_interval,
    load_instances,
    load_ratings,
    logistic_fit,
    logistic_predict,
    logistic_probability,
    macro_f1,
    mean_pairwise_pcc,
    normal_cdf,
    pearson,
    permutation_test,
    r_squared,
    ridge_fit,
    ridge_predict,
    run_cli,
    sequence_log_freq,
    smoothed_log_freq,
    steiger_test,
    union_matrices,
)

__all__ = [name for name in dir() if not name.startswith("_")]
