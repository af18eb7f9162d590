//! File formats, instance generation, verification and benchmarks on top
//! of `lpdist-core`, plus the `lpdist` command line.

pub mod bench;
pub mod cli;
pub mod error;
pub mod format;
pub mod gen;
pub mod run;
pub mod verify;

pub use error::{CliError, Result};
pub use run::{run, Algorithm, BackendChoice, Outcome, RunConfig, ValueKind};
