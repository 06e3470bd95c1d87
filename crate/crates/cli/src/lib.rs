//! Experiment runner behind the `continuum` binary.

pub mod experiment;
pub mod summary;

pub use experiment::{run_experiment, write_walker_tle, Experiment, ExperimentError, ExperimentSpec, RunSummary};
pub use summary::{format_table, summarize, summarize_run, write_csv, SummarizeError, SummaryRow};
