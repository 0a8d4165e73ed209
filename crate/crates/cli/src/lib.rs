//! Batch driver: run configurations, solves, audits and report files.

pub mod config;
pub mod driver;
pub mod error;

pub use config::{parse_config, Audit, MeshSpec, RunConfig};
pub use driver::{execute, generate_mesh, run_file, Mode, Outcome};
pub use error::CliError;

/// Process exit status for a finished run.
pub fn exit_code(outcome: &Outcome) -> i32 {
    if outcome.all_pass() {
        0
    } else {
        1
    }
}

/// Exit status for errors before or during a run.
pub const ERROR_EXIT: i32 = 2;
