use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: gcd({a}, {q}) = {gcd} > 1")]
    NotCoprime {
        what: &'static str,
        a: u64,
        q: u64,
        gcd: u64,
    },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("inexact division while computing {0}")]
    InexactDivision(&'static str),
    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: String,
        cap: String,
    },
    #[error("the determinant coset is empty")]
    EmptyCoset,
    #[error("division by a series with no nonzero term")]
    DivisionByZeroSeries,
    #[error("requested precision unachievable: error estimate {estimate} exceeds {requested}")]
    PrecisionUnachievable { estimate: String, requested: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("class sizes sum to {sum}, expected group order {order}")]
    SizeMismatch { sum: String, order: String },
    #[error("orthogonality violated between characters {row_a} and {row_b}: residual {residual}")]
    OrthogonalityViolation {
        row_a: usize,
        row_b: usize,
        residual: String,
    },
    #[error("eigenspace splitting failed at class matrix {0}")]
    EigenFailure(usize),
    #[error("character sum is not integral: residual {residual}")]
    NonIntegralResult { residual: String },
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("no element satisfies the determinant constraint: {0}")]
    InfeasibleConstraint(String),
    #[error("assertion failed: {0}")]
    AssertionFailure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
