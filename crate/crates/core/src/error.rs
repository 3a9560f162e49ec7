use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{a} and {b} are not coprime")]
    NotCoprime { a: u128, b: u128 },

    #[error("{n} is not prime")]
    NotPrime { n: u128 },

    #[error("invalid instance: need even g >= 4 and odd m >= 1, got g = {g}, m = {m}")]
    InvalidInstance { g: u128, m: u128 },

    #[error("point {x} outside the cycle window [1, {bound}]")]
    OutOfRange { x: u128, bound: u128 },

    #[error("search size {needed} exceeds the configured limit {limit}")]
    ResourceLimit { needed: u128, limit: u128 },

    #[error("{m} is divisible by g - 1 = {divisor}")]
    DivisibilityViolation { m: u128, divisor: u128 },

    #[error("digit word must be non-empty and contain at least one 1")]
    InvalidWord,

    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
