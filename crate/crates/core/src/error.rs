use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed raster {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("unsupported sample depth: {0}")]
    UnsupportedDepth(u32),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Short stable tag used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
            Error::UnsupportedDepth(_) => "unsupported-depth",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::UndefinedMetric(_) => "undefined-metric",
            Error::Config(_) => "invalid-config",
            Error::Consistency(_) => "consistency",
            Error::Json(_) => "json",
        }
    }
}
