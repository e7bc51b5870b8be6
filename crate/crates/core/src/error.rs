use thiserror::Error;

/// Errors produced by the numerical kernels and the file front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix dimension must be positive")]
    EmptyMatrix,

    #[error("entry count {len} does not form a square matrix")]
    NotSquare { len: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds {threshold:.3e})")]
    NotHermitian { asymmetry: f64, threshold: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("vector has zero norm")]
    ZeroVector,

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("at least two vectors are required, got {0}")]
    TooFewVectors(usize),

    #[error("order must be at least 2, got {0}")]
    InvalidOrder(usize),

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("operator norm {0} exceeds 1")]
    NormExceedsOne(f64),

    #[error("unknown matrix kind `{0}`")]
    UnknownKind(String),

    #[error("trial {trial} of ({dim}, {kind}) failed: {source}")]
    Trial {
        dim: usize,
        kind: String,
        trial: usize,
        source: Box<Error>,
    },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("{kind} at line {line}, column {column}: {message}")]
    Parse {
        kind: ParseErrorKind,
        line: usize,
        column: usize,
        message: String,
    },
}

/// Classification of matrix-file failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Malformed,
    NotSquare,
    NonFiniteEntry,
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Malformed => "parse error",
            ParseErrorKind::NotSquare => "matrix not square",
            ParseErrorKind::NonFiniteEntry => "non-finite entry",
        })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
