use thiserror::Error;

use crate::critical::GenericityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("elimination unsupported: {0}")]
    EliminationUnsupported(String),
    #[error("non-finite parameter `{0}`")]
    NonFinite(&'static str),
    #[error("conic quadratic part vanishes identically")]
    DegenerateConic,
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("grid resolution {0} is below the minimum of 64")]
    GridTooCoarse(usize),
    #[error("robot is not generic ({} pieces of evidence)", .0.evidence.len())]
    NonGenericRobot(Box<GenericityReport>),
    #[error("start or goal configuration is singular")]
    StartOrGoalSingular,
}
