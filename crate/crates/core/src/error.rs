use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid parameters (odd n, unsupported dimension, ...).
    #[error("grid: {0}")]
    Grid(String),

    /// Config-file parse error with the offending line number (1-based).
    #[error("config line {line}: {msg}")]
    ConfigLine { line: usize, msg: String },

    /// Invalid configuration detected after parsing (cross-key invariants,
    /// module preconditions).
    #[error("configuration: {0}")]
    Config(String),

    /// A trajectory produced non-finite coefficients.
    #[error("blow-up at t = {t}: {detail}")]
    BlowUp { t: f64, detail: String },

    /// Malformed snapshot or checkpoint file.
    #[error("format: {0}")]
    Format(String),

    /// Snapshot/checkpoint version not understood by this build.
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
