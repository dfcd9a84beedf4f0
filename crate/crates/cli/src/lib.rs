//! Verification suites behind the `pntap` command.

use std::fmt;

pub mod config;
pub mod output;
pub mod report;
pub mod suites;

pub use config::{Format, RunConfig};
pub use report::{Check, CheckKind, SuiteReport};
pub use suites::{load_tables, run_suite, RunOutcome, MANIFEST, SUITES};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_HARD_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Errors that end a run before a verdict.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Resource(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Resource(_) => EXIT_RESOURCE,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Resource(m) => write!(f, "resource error: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<pntap_core::Error> for Failure {
    fn from(e: pntap_core::Error) -> Self {
        use pntap_core::Error as E;
        match e {
            E::Parameter(_) | E::Domain(_) | E::NotCoprime { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Resource(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Resource(e.to_string())
    }
}
