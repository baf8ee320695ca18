use alloc::string::String;
use num_bigint::BigUint;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid array code: {0}")]
    InvalidCode(String),

    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("{what} requires {required} columns, above the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        required: BigUint,
        cap: u64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
