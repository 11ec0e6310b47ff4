//! Experiment harness: configuration, runs and sweeps, rollout logs, metrics,
//! statistical comparison, replay verification and CSV reports.

pub mod compare;
pub mod config;
pub mod error;
pub mod log;
pub mod replay;
pub mod report;
pub mod run;
pub mod stats;

pub use config::{EnvKind, ExplorerKind, RunConfig};
pub use error::{Error, Result};
pub use run::{run_experiment, sweep, RunOutcome, Summary};
