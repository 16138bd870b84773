//! Command-line front end for `qcap`: run configuration, the check registry,
//! and machine-readable reports.

pub mod anchors;
pub mod args;
pub mod checks;
pub mod commands;
pub mod config;
pub mod report;

pub use checks::{Cell, Check, Outcome, Registry};
pub use commands::{cmd_capacity, cmd_decompose, cmd_measures, cmd_verify, Command};
pub use config::{Format, RunConfig};
pub use report::{Record, Report};

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
}
