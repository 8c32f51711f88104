use thiserror::Error;

use crate::group::Weight;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported group `{0}`")]
    UnsupportedGroup(String),
    #[error("reflection index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("weight {0} is not dominant")]
    NotDominant(Weight),
    #[error("weight {0} is not strictly dominant")]
    NotStrictlyDominant(Weight),
    #[error("operation requires a simple group, got `{0}`")]
    NotSimple(String),
    #[error("point {s:?} is not in F_{m}")]
    OutsideGrid { s: Vec<i64>, m: u32 },
    #[error("grid parameter M must be at least 1")]
    ZeroDenominator,
    #[error("weight-multiplicity projection residual {residual:e} too large; raise the grid level above {m}")]
    ProjectionResidual { residual: f64, m: u32 },
    #[error("polynomial coefficient {coefficient} of {monomial} is not an integer")]
    NonIntegral { monomial: String, coefficient: String },
    #[error("nonzero remainder after decomposition: {0}")]
    NonzeroRemainder(String),
    #[error("no branching rule `{0}` in the catalog")]
    UnknownRule(String),
    #[error("parse error: {0}")]
    Parse(String),
}
