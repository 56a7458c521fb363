use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gonality must be at least 3, got {0}")]
    InvalidGonality(u64),

    #[error("arithmetic range exceeded: {0}")]
    ArithmeticRange(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("bound {bound} exceeds the configured cap {cap}")]
    BoundTooLarge { bound: u64, cap: u64 },

    #[error("tree was truncated; {0}")]
    Truncated(String),

    #[error("cache format: {0}")]
    CacheFormat(String),

    #[error("cache version {found} is not the supported version {expected}")]
    CacheVersion { found: u16, expected: u16 },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse: {0}")]
    Parse(String),
}
