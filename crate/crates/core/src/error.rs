//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("arguments {a} and {n} are not coprime")]
    NotCoprime { a: u64, n: u64 },
    #[error("modulus {0} is out of range (need n >= 2)")]
    BadModulus(u64),
    #[error("size bound exceeded: {what} = {value} > {bound}")]
    SizeBound {
        what: &'static str,
        value: u128,
        bound: u128,
    },
    #[error("{m} does not divide the order {order} of the multiplicative group")]
    NoSuchRootOfUnity { m: u64, order: String },
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("field context mismatch")]
    CtxMismatch,
    #[error("group mismatch")]
    GroupMismatch,
    #[error("malformed group spec {0:?}: expected C<n>(xC<n>)*")]
    BadGroupSpec(String),
    #[error("invalid involution: {0}")]
    BadInvolution(String),
    #[error("enumeration bound exceeded: 2^{subsets} subset sums > {bound}")]
    EnumerationBound { subsets: usize, bound: u64 },
    #[error("element is not an idempotent")]
    NotIdempotent,
    #[error("support of the element is not closed under squaring (so it is not an idempotent)")]
    NotClosedUnderSquaring,
    #[error("operation requires a semisimple group algebra: gcd({q}, {order}) != 1")]
    NotSemisimple { q: u64, order: u64 },
    #[error("group of odd order required, got |G| = {0}")]
    EvenOrder(u64),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
