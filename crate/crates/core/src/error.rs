use std::io;

use thiserror::Error;

/// Errors raised by the solvers, kernels and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("vector is zero")]
    ZeroVector,

    #[error("non-finite value encountered: {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not symmetric: entry ({row}, {col}) = {value} but mirror is {mirror}")]
    Asymmetric {
        row: usize,
        col: usize,
        value: f64,
        mirror: f64,
    },

    #[error("state overflowed after step {step}; reduce the time step")]
    Overflow { step: usize },

    #[error("degenerate spectrum: upper bound {hi} does not exceed lower bound {lo}")]
    DegenerateSpectrum { lo: f64, hi: f64 },

    #[error("orthonormalization dropped every vector")]
    EmptySpan,

    #[error("gap scan failed: every candidate diverged; try a smaller time step")]
    ScanFailed,

    #[error("solver failed: {0}")]
    Failed(String),

    #[error("unsupported format: {0}")]
    Unsupported(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
