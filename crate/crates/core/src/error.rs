use thiserror::Error;

use crate::numeric::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("floor division requires a positive divisor, got {0}")]
    NonPositiveDivisor(String),

    #[error("square root of negative value {0}")]
    NegativeSqrt(String),

    #[error("invalid interval: lower bound {lo} exceeds upper bound {hi}")]
    InvalidInterval { lo: String, hi: String },

    #[error("budget exceeded; best enclosure {best}")]
    BudgetExceeded { best: Interval },

    #[error("cannot invert: sign not established within budget (enclosure {enclosure})")]
    SignUndetermined { enclosure: Interval },

    #[error("cannot take square root: sign not established within budget (enclosure {enclosure})")]
    SqrtSignUndetermined { enclosure: Interval },

    #[error("{0} is not floor-exact")]
    NotFloorExact(String),

    #[error("supremum of an empty family")]
    EmptyFamily,

    #[error("odd extension requires h(0) = 0, got {0}")]
    NonzeroAtOrigin(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input at line {line}: {message}")]
    Malformed { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
