use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input contained NaN or infinite entries.
    #[error("input contains non-finite entries")]
    NonFiniteInput,

    /// Matrix failed the positive-semidefiniteness check.
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    /// The top eigenvalue is zero, so ratio quantities are undefined.
    #[error("degenerate spectrum: top eigenvalue is zero")]
    DegenerateSpectrum,

    /// An argument is outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A combinatorial or numeric work guard was exceeded.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// A per-eigenvalue bound was requested where it is undefined.
    #[error("bound undefined: {0}")]
    UndefinedBound(String),

    /// Bernstein parameters degenerate for the requested evaluation.
    #[error("degenerate Bernstein parameters: {0}")]
    DegenerateParams(String),

    /// Input text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
