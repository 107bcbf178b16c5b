use thiserror::Error;

use crate::subset::Subset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MdlError {
    #[error("field order {0} is not a prime power in 2..=32")]
    InvalidFieldOrder(usize),

    #[error("field element {value} out of range for GF({q})")]
    ElementOutOfRange { value: usize, q: usize },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("element index {index} outside ground set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("ground set of {0} elements exceeds the {max} element cap", max = crate::subset::MAX_ELEMENTS)]
    GroundTooLarge(usize),

    #[error("contract set and delete set overlap: {0}")]
    Overlap(Subset),

    #[error("{what}: {count} exceeds cap {cap} (raise with MDL_CAP_OVERRIDE)")]
    TooLarge {
        what: &'static str,
        count: usize,
        cap: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("found a U({rank},{size}) restriction on {witness}")]
    UniformRestriction {
        rank: usize,
        size: usize,
        witness: Subset,
    },

    #[error("invalid stack certificate: {0}")]
    InvalidCertificate(String),

    #[error("density oracle disagrees with exact value: oracle {oracle}, exact {exact}")]
    OracleInconsistent { oracle: String, exact: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MdlError {
    fn from(e: std::io::Error) -> Self {
        MdlError::Io(e.to_string())
    }
}

pub type Result<T, E = MdlError> = std::result::Result<T, E>;
