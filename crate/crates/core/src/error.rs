use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by parameter validation and the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("incompatible series: leading exponents {left} and {right} differ")]
    IncompatibleValence { left: u32, right: u32 },

    #[error("series division by a series with vanishing leading coefficient")]
    DivisionByZero,

    #[error("series needs coefficients up to z^{needed}, but is truncated at z^{available}")]
    InsufficientOrder { needed: u32, available: u32 },

    #[error("series is not normalized: expected leading term z^{lead} with coefficient 1")]
    NotNormalized { lead: u32 },

    #[error("majorant ratio {ratio} is not below 1/r = {limit}; tail error is unbounded")]
    UnboundedTail { ratio: f64, limit: f64 },

    #[error("Janowski function has a pole at z = {z}")]
    JanowskiPole { z: Complex64 },

    #[error("operator image L f vanishes at sample z = {z}")]
    VanishingOperator { z: Complex64 },

    #[error("denominator A - B h(z) vanishes at sample z = {z}")]
    VanishingDenominator { z: Complex64 },

    #[error("convolution kernel undefined: [p,q] A = B")]
    KernelUndefined,

    #[error("non-integer eta = {eta} needs an explicit branch choice")]
    BranchRequired { eta: f64 },

    #[error("Schwarz certificate violated: sum of |w_j| = {sum} exceeds 1")]
    NotSchwarz { sum: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
