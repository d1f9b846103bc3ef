use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("structural error: {0}")]
    Structure(String),
    /// A parameter outside the supported range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A resource cap was hit; `partial` counts what was produced before stopping.
    #[error("cap exceeded: {what} (limit {cap}, reached {partial})")]
    Cap { what: String, cap: usize, partial: usize },
    /// Input that fails a required validation (e.g. not an automorphism).
    #[error("validation error: {0}")]
    Validation(String),
    /// A computed result violated a property that the construction guarantees.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_error(what: impl Into<String>, cap: usize, partial: usize) -> Error {
    Error::Cap { what: what.into(), cap, partial }
}
