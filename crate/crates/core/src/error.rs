use thiserror::Error;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: String, right: String },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("unsupported group `{0}`")]
    UnsupportedGroup(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid character: {0}")]
    InvalidCharacter(String),

    #[error("{0} must be nonempty")]
    EmptySet(&'static str),

    #[error("index {index} out of range {min}..={max}")]
    IndexOutOfRange { index: usize, min: usize, max: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("rejection sampler exhausted {0} proposals without acceptance")]
    RejectionExhausted(usize),

    #[error("duplicate point {0}")]
    DuplicatePoint(String),

    #[error("window of size {size} exceeds the limit of {limit}")]
    WindowTooLarge { size: usize, limit: usize },

    #[error("not positive definite on the window (worst value {value:.6e})")]
    NotPositiveDefinite { value: f64 },

    #[error("window underflow: {0}")]
    WindowUnderflow(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "level {level} needs a Følner set of {required} elements, above the cap of {cap}; \
         lower the depth or switch to practical mode"
    )]
    PlanOverflow { level: usize, required: u128, cap: u64 },

    #[error("coverage shortfall at level {level}: {realized:.6} < {required:.6}")]
    CoverageShortfall {
        level: usize,
        realized: f64,
        required: f64,
    },

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
