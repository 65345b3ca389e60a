//! Command-line front end of cusp3r: robot files, analysis orchestration and
//! JSON, CSV and SVG emitters.

pub mod cli;
pub mod commands;
pub mod csv;
pub mod report;
pub mod robot_file;
pub mod svg;

use thiserror::Error;

pub use cli::{Cli, Command, Format, PlotKind};
pub use commands::{run, Outcome};
pub use robot_file::{parse_robot_file, parse_robot_str, RobotFileError, RobotSpec, RobotSpecFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    RobotFile(#[from] RobotFileError),
    #[error(transparent)]
    Core(#[from] cusp3r_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Exit status of a verdict-free command that succeeded.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CUSPIDAL: i32 = 2;
pub const EXIT_NON_GENERIC: i32 = 3;
