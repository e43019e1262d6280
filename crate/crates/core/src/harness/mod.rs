//! Experiment configs, test suites and the registry of verifiable inequalities.

pub mod config;
pub mod decay;
pub mod inequalities;
pub mod probe;
pub mod registry;
pub mod report;
pub mod suite;

pub use config::{ExperimentConfig, LambdaChoice, OperatorChoice, VRule};
pub use decay::{median_decay, median_decay_check, DecayFlag};
pub use registry::{lookup, registry, Check, GridRun, Inequality, Sample};
pub use report::{refinement_study, run_inequality, run_with, write_csv, Report, RunOptions, RunOutput};
pub use suite::{generate_suite, Member, Shape, SuiteSpec};
