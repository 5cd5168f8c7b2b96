use thiserror::Error;

/// Errors raised by the library. Variants that describe invariant
/// violations indicate a bug rather than bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("coefficient of x^{index} is not divisible by the scale factor")]
    NonIntegralQuotient { index: usize },

    #[error("p-adic lift for p = {p} did not resolve within {depth} digits")]
    LiftAmbiguous { p: u64, depth: u32 },

    #[error("polynomial has no root modulo {witness}")]
    NotIntersective { witness: u64 },

    #[error("prime factor {p} exceeds the root-data bound {bound}")]
    PrimeOutOfRange { p: u64, bound: u64 },

    #[error("nesting identity fails for d = {d}, q = {q} at n = {n}")]
    NestingViolation { d: u64, q: u64, n: u64 },

    #[error("derivative is identically zero")]
    ZeroDerivative,

    #[error("gcd({a}, {q}) != 1")]
    NotCoprime { a: i64, q: u64 },

    #[error("element {value} lies outside [1, {n}]")]
    SetOutOfRange { value: i64, n: u64 },

    #[error("{what}: size {size} exceeds limit {limit}")]
    TooLarge { what: &'static str, size: u128, limit: u128 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
