use thiserror::Error;

/// Errors produced by the geometry, group and counting layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("expected a {expected} isometry, found {found}")]
    Kind { expected: &'static str, found: String },

    #[error("displacement {t} is below the class minimum {minimum}")]
    BelowMinimum { t: f64, minimum: f64 },

    #[error("horoball based at {horoball} does not match the fixed point {fixed}")]
    Consistency { horoball: String, fixed: String },

    #[error("identity class: {0}")]
    IdentityClass(String),

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("invalid group specification: {0}")]
    InvalidGroup(String),

    #[error("invalid class: {0}")]
    InvalidClass(String),

    #[error("ball enumeration exceeded the cap of {cap} elements at radius {radius}")]
    BallCap { cap: usize, radius: f64 },

    #[error("saturation check failed: {0}")]
    Saturation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("constraint violation: {0}")]
    Constraint(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
