//! Exact real arithmetic on Eudoxus reals: reals represented by integer
//! functions whose additive defect is bounded by an explicit certificate.

#![allow(clippy::result_large_err)]

pub mod error;
pub mod expr;
pub mod lemmas;
pub mod multidim;
pub mod numeric;
pub mod real;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
pub use numeric::{Interval, Rat};
pub use real::{
    compare, digits, digits_by_enclosure, sup_finite, AlmostHom, Budget, Comparison, ExactValue,
    FloorResult, SignResult,
};
