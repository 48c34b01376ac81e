use thiserror::Error;

/// Errors raised by the optimizer, the checkers and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where a formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid experiment or command-line configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// An inline runtime check failed and the run was aborted.
    #[error("check aborted run: {0}")]
    CheckAbort(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
