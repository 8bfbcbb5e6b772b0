//! Sweep configuration, CSV results and the verification suite used by the
//! `dqc-bench` binary.

pub mod config;
pub mod results;
pub mod sweep;
pub mod verify;

pub use config::SweepConfig;
pub use results::ResultRow;
pub use sweep::{run_point, run_sweep, SweepReport};
pub use verify::{run_checks, CheckResult, VerifyOptions};
