//! Synthetic datasets, test-set resampling and distortion experiments.

pub mod experiment;
pub mod gaussian;
pub mod resample;

pub use experiment::{
    normalized_stability, population_std_dev, run_experiment, write_long_csv, write_summary_csv, ExperimentKind,
    ExperimentResult, ExperimentSpec, NormalizedStability, ResultRow, Statistic, SummaryRow,
};
pub use gaussian::{
    generate_gaussian_dataset, hexagon_specs, threshold_classifier_confusion, type1_specs, Dataset,
    GaussianClassSpec, Side, ThresholdRule,
};
pub use resample::{
    resample_matrix_to_counts, resample_matrix_to_rrt, resample_points_to_rrt, rrt_counts, subsample_to_counts,
    synthetic_multiclass_confusion,
};
