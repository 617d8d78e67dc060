use thiserror::Error;

use crate::model::ValidationError;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Validation(Box<ValidationError>),
    #[error("instance has {n} agents; exhaustive enumeration supports at most {limit}")]
    Size { n: usize, limit: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A loop bound or safety invariant tripped. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl From<ValidationError> for SolveError {
    fn from(err: ValidationError) -> Self {
        SolveError::Validation(Box::new(err))
    }
}
