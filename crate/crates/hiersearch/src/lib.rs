//! Experiment harness, file formats and parallel execution for
//! [`hiersearch_core`].

pub mod config;
pub mod error;
pub mod exec;
pub mod harness;
pub mod output;
pub mod problem;

pub use config::{ExperimentConfig, Method, SearchParams, Sweep, SweepAxis};
pub use error::HarnessError;
pub use exec::{ExecMode, Rayon};
pub use harness::{run_experiment, run_method, MethodSummary, TrialSummary};
pub use problem::Problem;
