//! Command-line front end: run configuration, the analysis pipeline, the
//! verification suites and their on-disk outputs.

pub mod config;
pub mod error;
pub mod fixtures;
pub mod output;
pub mod pipeline;
pub mod verify;

pub use config::{InputFormat, RunConfig};
pub use error::{CliError, CliResult};
pub use pipeline::{run_pipeline, run_pipeline_on, BettiRecord, PipelineRun, RunReport, ScaleRecord, SuiteResult};
pub use verify::run_verification;

/// Exit status for a completed run whose checks failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
