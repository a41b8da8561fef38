use thiserror::Error;

use crate::grid::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: field `{field}`: {reason}")]
    InvalidInput { field: String, reason: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("area promise violated: bars cover {covered} cells but the region has {cells}")]
    Promise { covered: usize, cells: usize },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid tiling: {0}")]
    InvalidTiling(ValidationReport),

    #[error("search budget exceeded: {0}")]
    Budget(String),

    #[error("no gadget found inside a {width}x{height} block")]
    SearchExhausted { width: usize, height: usize },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn input(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
