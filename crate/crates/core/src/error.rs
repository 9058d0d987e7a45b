use thiserror::Error;

use crate::cache::CacheError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse constraint text {text:?}: {reason}")]
    Parse { text: String, reason: String },

    #[error("codimension {codim} is outside 1..={n}")]
    CodimOutOfRange { codim: u32, n: u32 },

    #[error("degree must be at least 1")]
    ZeroDegree,

    #[error("ambient dimension {0} is not supported here (need n >= 2)")]
    InvalidAmbient(u32),

    #[error(
        "tau is implemented for n in 2..=4 only; n = {0} needs the general multi-stratum blow-up, \
         which is out of scope"
    )]
    UnsupportedAmbient(u32),

    #[error("ambient mismatch: engine works in P^{engine}, query is for P^{query}")]
    AmbientMismatch { engine: u32, query: u32 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension defect {defect} (constraints do not cut a finite count)")]
    Dimension { defect: i64 },

    #[error("internal consistency: {what} is not integral ({value}) along the {path} path")]
    NonIntegral {
        what: &'static str,
        value: String,
        path: &'static str,
    },

    #[error("the closed form needs only points and lines ({0})")]
    UnsupportedConstraints(String),

    #[error(transparent)]
    Cache(#[from] CacheError),
}

pub type Result<T> = std::result::Result<T, Error>;
