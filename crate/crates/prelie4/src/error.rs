use thiserror::Error;

/// Errors shared across the crate.
///
/// The CLI maps these onto its exit-code contract: validation problems are
/// exit 2, malformed input is exit 3, regime violations (prime too small for
/// the nilpotency index) are exit 4 and internal invariant breaches are 5.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the configured bound {1}")]
    PrimeTooLarge(u64, u64),
    #[error("unsupported group shape {0:?}; expected [1,1,1,1], [3,1] or [2,2]")]
    UnsupportedShape(Vec<u32>),
    #[error("rank mismatch: element has {got} coefficients, shape has rank {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(u64, u64),
    #[error("factorial table needs {k}! invertible mod a power of {p}; require k < p")]
    FactorialRange { k: u64, p: u64 },
    #[error("ring is not strongly nilpotent: chain stabilized at order {order}")]
    NotNilpotent { order: u64 },
    #[error("regime violation: {0}")]
    Regime(String),
    #[error("family constraint violation: {0}")]
    FamilyConstraint(String),
    #[error("enumeration space of size {size} exceeds budget {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("size guard: {0}")]
    SizeGuard(String),
    #[error("internal invariant breach: {0}")]
    Internal(String),
    #[error("malformed document: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
