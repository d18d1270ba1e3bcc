use thiserror::Error;

/// Errors raised across the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller violated a precondition (dimension mismatch, bad index, ...).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A node, pivot or time budget ran out before the search finished.
    #[error("budget exhausted: {what}")]
    BudgetExhausted {
        what: String,
        /// Best point found before the budget ran out.
        incumbent: Option<Vec<f64>>,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("all pieces of the union are empty")]
    EmptyUnion,

    #[error("piece {0} is unbounded")]
    UnboundedPiece(usize),

    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("validation error at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("i/o error on `{path}`: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn ensure_dim(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(usage(format!(
            "{what}: expected dimension {expected}, got {got}"
        )));
    }
    Ok(())
}
