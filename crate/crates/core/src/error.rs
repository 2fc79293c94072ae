use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("analysis domain covers only {covered:.3e} of the density mass")]
    Truncation { covered: f64 },

    #[error("bin width {width} ps is finer than the grid step {dt} ps")]
    Resolution { width: f64, dt: f64 },

    #[error("time {t} ps lies outside the domain [{start}, {end}) ps")]
    Range { t: f64, start: f64, end: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("density has {modes} separate regions above half maximum")]
    Ambiguous { modes: usize },

    #[error("no usable peak: {0}")]
    NoSignal(String),

    #[error("timestamps are not sorted at index {index}")]
    Ordering { index: usize },

    #[error("need at least {needed} rows, got {got}")]
    Size { needed: usize, got: usize },

    #[error("sweep row {row} failed: {source}")]
    Sweep {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
