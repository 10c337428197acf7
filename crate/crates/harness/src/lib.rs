//! Experiment orchestration for `nsga-approx`: configuration files, a
//! parallel runner for the Table 1 grid, quartile and block summaries, and
//! CSV/JSON output. The `nsga-approx` binary wraps this crate.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod summary;

pub use config::{ExperimentConfig, Overrides, Window};
pub use error::{HarnessError, Result};
pub use experiment::{
    execute_run, run_experiment, ExperimentResult, RunOutcome, RunRecord, RunStatus, Setting,
};
pub use summary::{quartiles, steady_state_block_stats, BlockStats, QuartileSummary};

/// Process exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 1;
/// Process exit status when a proven guarantee was broken.
pub const EXIT_VIOLATION: i32 = 2;
/// Process exit status when a run did not find both extremes.
pub const EXIT_TIMEOUT: i32 = 3;
