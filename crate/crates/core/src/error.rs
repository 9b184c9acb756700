//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A CSV row that could not be parsed, with its 1-based line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    /// Input violates the declared schema (header, duplicate timestamps, ...).
    #[error("schema error: {0}")]
    Schema(String),

    /// Linear interpolation cannot fill leading or trailing gaps.
    #[error("imputation error: column '{column}' has {kind} missing values")]
    Imputation { column: String, kind: GapKind },

    /// Not enough rows to perform the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Dimension mismatch between tensors or parameter blocks.
    #[error("shape error: {0}")]
    Shape(String),

    /// An argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A column name not present in the feature registry.
    #[error("registry error: unknown column '{0}'")]
    UnknownColumn(String),

    /// Non-finite values encountered mid-computation.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Iterative fit did not converge within its iteration cap.
    #[error("convergence error: {0}")]
    Convergence(String),

    /// Training produced a non-finite loss.
    #[error("divergence at epoch {epoch}, batch {batch}: {message}")]
    Divergence {
        epoch: usize,
        batch: usize,
        message: String,
    },

    /// Invalid configuration values.
    #[error("config error: {0}")]
    Config(String),

    /// Checkpoint and data bundle do not belong together.
    #[error("compatibility error: {0}")]
    Compatibility(String),

    /// Grid search produced no usable run.
    #[error("search error: {0}")]
    Search(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Where in a column an unfillable gap sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapKind {
    Leading,
    Trailing,
}

impl std::fmt::Display for GapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GapKind::Leading => write!(f, "leading"),
            GapKind::Trailing => write!(f, "trailing"),
        }
    }
}

impl Error {
    /// Attach a path to an `std::io::Error`.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
