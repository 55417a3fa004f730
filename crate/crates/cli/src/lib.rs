//! Driver behind the `cadual` binary: configuration, verification suites,
//! simulations and report assembly.
//!
//! Every randomised input is drawn from ChaCha8 seeded with the run seed,
//! one stream per suite, so a `(config, seed)` pair fixes the whole report.

pub mod config;
pub mod inputs;
pub mod report;
pub mod suites;

use std::path::PathBuf;

pub use config::{Command, Format, RunConfig};
pub use report::{emit_report, machine_section, Record, Report};
pub use suites::run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid {field}: {reason}")]
    Usage { field: &'static str, reason: String },
    #[error(transparent)]
    Core(#[from] cadual_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl CliError {
    pub fn usage(field: &'static str, reason: impl Into<String>) -> Self {
        Self::Usage {
            field,
            reason: reason.into(),
        }
    }
}

/// Exit status for a finished run: 0 when every contract holds, 1 otherwise.
pub fn exit_code(report: &Report) -> i32 {
    if report.machine.summary.failed == 0 {
        0
    } else {
        1
    }
}

/// Exit status for a run that could not produce a report.
pub const USAGE_EXIT: i32 = 2;
