use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's contract (shapes, lengths, ranges).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A dense decomposition failed to converge.
    #[error("numeric failure: decomposition of a {rows}x{cols} matrix did not converge")]
    NumericFailure { rows: usize, cols: usize },

    /// An operator required to be invertible is singular at the configured tolerance.
    #[error("operator is not invertible: sigma_min = {sigma_min:e}, threshold = {threshold:e}")]
    NotInvertible { sigma_min: f64, threshold: f64 },

    /// A sequence required to be a frame has a lower bound below threshold.
    #[error("not a frame: lower bound {alpha:e} is not above {threshold:e} (upper bound {beta:e})")]
    NotAFrame { alpha: f64, beta: f64, threshold: f64 },

    /// A theorem precondition does not hold on the given instance.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid instance file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
