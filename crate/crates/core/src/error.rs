use nalgebra::Complex;
use thiserror::Error;

use crate::dynamics::DynamicsTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown path id {0}")]
    UnknownPath(usize),
    #[error("unknown ISP index {0}")]
    UnknownIsp(usize),
    #[error("unknown market index {0}")]
    UnknownMarket(usize),
    #[error("path {path} is not part of market {market}")]
    PathNotInMarket { market: usize, path: usize },
    #[error("attribute matrix is {found_rows}x{found_cols}, model needs {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported scope: {0}")]
    UnsupportedScope(String),
    #[error("degenerate cost for ISP {isp}, attribute {attribute}: d*phi + gamma = 0")]
    DegenerateCost { isp: usize, attribute: usize },
    #[error("ISP {isp} has no valuation weight on attribute {attribute} in this market")]
    NoValuationWeight { isp: usize, attribute: usize },
    #[error("degenerate quadratic: both leading coefficients vanish")]
    DegenerateQuadratic,
    #[error("no real equilibrium: discriminant {0} is negative")]
    NoRealEquilibrium(f64),
    #[error("no (ISP, attribute) candidate with a finite ratio on path {0}")]
    EmptyAttributeSet(usize),
    #[error("zero gamma for ISP {isp}, attribute {attribute}: ratio is unbounded")]
    DegenerateRatio { isp: usize, attribute: usize },
    #[error("quartic solver failed ({message}); roots: {roots:?}")]
    SolverFailure {
        message: String,
        roots: Vec<Complex<f64>>,
    },
    #[error("dynamics diverged at round {round}")]
    Divergence {
        round: usize,
        trace: Box<DynamicsTrace>,
    },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph validation failed: {0}")]
    Validation(String),
    #[error("zero distance for pair ({0}, {1})")]
    ZeroDistance(u32, u32),
    #[error("gravity allocation impossible: all pair weights are zero")]
    Allocation,
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of a numeric routine, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::DegenerateQuadratic
                | Error::NoRealEquilibrium(_)
                | Error::SolverFailure { .. }
                | Error::Divergence { .. }
                | Error::Numeric(_)
                | Error::DegenerateCost { .. }
                | Error::NoValuationWeight { .. }
                | Error::DegenerateRatio { .. }
        )
    }
}
