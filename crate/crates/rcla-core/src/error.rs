use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A file row could not be parsed (malformed CSV, bad date, bad number).
    #[error("parse error in {path} line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// A file parsed but violates a series invariant (gap, non-positive level, ...).
    #[error("validation error in {path} line {line}: {msg}")]
    Validation {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// An in-memory value violates a domain invariant.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A series does not span the requested month window.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// A PDE grid is too coarse or does not extend far enough.
    #[error("grid error: {0}")]
    Grid(String),

    /// A linear solve failed or produced non-finite values.
    #[error("convergence error: {0}")]
    Convergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad or missing input data (as opposed to
    /// numerical failures). The CLI uses this to pick its exit code.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Validation { .. }
                | Error::Invalid(_)
                | Error::Coverage(_)
                | Error::Io(_)
        )
    }
}
