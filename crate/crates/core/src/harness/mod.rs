//! Monte Carlo studies: configuration, execution, metrics and output files.

pub mod config;
pub mod metrics;
pub mod output;
pub mod study;

pub use config::{EstimatorKind, StudyConfig};
pub use metrics::{max_qq_deviation, median, mise, mse, qq_export, sample_variance};
pub use output::{read_estimates_csv, write_study};
pub use study::{run_study, EstimateRecord, NSummary, StudyResult};
