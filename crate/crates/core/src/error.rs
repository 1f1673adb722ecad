use thiserror::Error;

/// Domain errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square")]
    NotSquare,
    #[error("index {index} out of range for size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("matrix is not sign-skew-symmetric")]
    NotSignSkewSymmetric,
    #[error("matrix is not skew-symmetrizable")]
    NotSkewSymmetrizable,
    #[error("diagram not realizable: product {0} is not a perfect square")]
    NotRealizable(String),
    #[error("equivalence indeterminate: both searches exceeded the size cap")]
    Indeterminate,
    #[error("invalid Cartan-Killing type: {0}")]
    InvalidType(String),
    #[error("division is not exact")]
    InexactDivision,
    #[error("expression has no denominator normal form")]
    NoNormalForm,
    #[error("roots are not exchangeable")]
    NotExchangeable,
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("size cap {0} exceeded")]
    CapExceeded(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
