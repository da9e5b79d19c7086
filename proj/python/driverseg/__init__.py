"""Driver segmentation from CAN-signal feature histograms.

Thin Python layer over the C++ core; see the package README for the
pipeline CLI and file formats.
"""

from ._driverseg import (
    BinSpec,
    Clustering,
    CrossValCell,
    FleetSpec,
    PcaProjection,
    SubsampleCurve,
    UniformSeries,
    build_histogram,
    cross_validate,
    difference_quotient,
    global_bin_spec,
    kmeans,
    moving_mean,
    moving_median,
    moving_std,
    pca_project,
    peak_intervals,
    peak_values,
    percentile,
    resample_linear,
    robustness_curve,
    select_optimal_k,
    singular_points,
    split_train_validation,
    subsample_contiguous,
    subsample_independent,
    synthetic_feature_vectors,
    trim_percentiles,
    v_measure,
)

__all__ = [
    "BinSpec",
    "Clustering",
    "CrossValCell",
    "FleetSpec",
    "PcaProjection",
    "SubsampleCurve",
    "UniformSeries",
    "build_histogram",
    "cross_validate",
    "difference_quotient",
    "global_bin_spec",
    "kmeans",
    "moving_mean",
    "moving_median",
    "moving_std",
    "pca_project",
    "peak_intervals",
    "peak_values",
    "percentile",
    "resample_linear",
    "robustness_curve",
    "select_optimal_k",
    "singular_points",
    "split_train_validation",
    "subsample_contiguous",
    "subsample_independent",
    "synthetic_feature_vectors",
    "trim_percentiles",
    "v_measure",
]
