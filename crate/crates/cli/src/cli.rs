use std::path::PathBuf;

use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Full pipeline and cuspidality verdict.
    Classify,
    /// Inverse kinematics of `--point`.
    Ik,
    /// Forward kinematics of `--config`.
    Fk,
    /// Critical points and critical values.
    Critical,
    Cusps,
    Nodes,
    /// Aspect and reduced-aspect maps, plus labels of `--point` if given.
    Aspects,
    /// Pseudosingularity curves.
    Pseudo,
    /// Nonsingular path from `--config` to `--goal`.
    Path,
    /// SVG figure selected by `--what`.
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Workspace,
    Jointspace,
    C3s3,
}

#[derive(Debug, Parser)]
#[command(name = "cusp3r", version, about = "Cuspidality analysis of 3R positional manipulators")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Robot file (JSON object of named robots).
    #[arg(long)]
    pub robot: PathBuf,
    /// Robot to analyse; required when the file holds several.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value_t = 720, value_parser = clap::value_parser!(u64).range(64..))]
    pub grid: u64,
    /// Directory for CSV and SVG files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "json")]
    pub format: Vec<Format>,
    /// Cross-section point `RHO,Z`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    /// Joint configuration `T1,T2,T3` in radians.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub config: Option<Vec<f64>>,
    /// Goal configuration of `path`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub goal: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "workspace")]
    pub what: PlotKind,
    /// Workspace census resolution.
    #[arg(long, default_value_t = 160)]
    pub census: usize,
    /// Audited points per sampling check.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0x3c05_9a11)]
    pub seed: u64,
    /// Adds wall-clock timings to the classify report (breaks byte-identity).
    #[arg(long)]
    pub timing: bool,
}
