use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the library. Precondition violations and resource
/// refusals are kept distinct so callers can map them to different exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("the two primes must be distinct, got {0} twice")]
    EqualPrimes(u64),

    #[error("{value} has denominator support {found:?}, which is not contained in {allowed:?}")]
    SupportViolation {
        value: String,
        found: Vec<u64>,
        allowed: Vec<u64>,
    },

    #[error("{element} lies in the subgroup {modulus}*Z, so no character can separate it")]
    ElementInSubgroup { element: String, modulus: String },

    #[error("power {power} lies outside the weight table domain (max {max})")]
    DomainExceeded { power: String, max: String },

    #[error("{value} is not representable within the given term and exponent bounds")]
    NotRepresentable { value: String },

    #[error("estimated working-set size {estimated} exceeds the configured cap {cap}")]
    ResourceLimit { estimated: u128, cap: u128 },

    #[error("{0}")]
    InvalidParameter(String),
}
