use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a positive odd squarefree integer")]
    NotOddSquarefree(i128),

    #[error("invalid Jacobi modulus {0}: must be odd and positive")]
    InvalidModulus(i128),

    #[error("{a} and {b} are not coprime")]
    NotCoprime { a: i128, b: i128 },

    #[error("square enumeration modulo {0} exceeds the 10^6 limit")]
    EnumerationTooLarge(u64),

    #[error("omega(D) = {omega} exceeds the limit {limit} for quadruple sums")]
    OmegaTooLarge { omega: usize, limit: usize },

    #[error("{d} is not a Table-1 discriminant: {reason}")]
    NotFundamental { d: i128, reason: String },

    #[error("form ({a}, {b}, {c}) is not primitive")]
    NotPrimitive { a: i64, b: i64, c: i64 },

    #[error("discriminant {0} is a perfect square")]
    SquareDiscriminant(i64),

    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),

    #[error("|discriminant| {disc} exceeds the bound {bound}")]
    BoundExceeded { disc: i64, bound: u64 },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("theorem check failed: {0}")]
    AssertionFailed(String),
}
