use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside an operation's domain: non-finite values, out-of-range
    /// arguments, or mismatched lengths.
    #[error("{0}")]
    Domain(String),

    /// Covariance factorization failed even at the top of the jitter schedule.
    #[error("factorization failed for {n}x{n} covariance (trace {trace:.6e}, last jitter {jitter:.6e})")]
    Factorization { n: usize, trace: f64, jitter: f64 },

    /// Rejected configuration input; `key` names the offending entry.
    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
