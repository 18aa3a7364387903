use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{AlmostHom, Budget};
use crate::numeric::{floor_rat, Interval, Rat};

/// Outcome of a budgeted sign query.
///
/// Zero is never reported: a nonzero certificate leaves every enclosure
/// with positive width. `Inconclusive([0,0])` (only possible with
/// certificate 0) means the value is provably zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignResult {
    Positive,
    Negative,
    Inconclusive(Interval),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Comparison {
    Less,
    Greater,
    /// Carries the enclosure of `y − x`.
    Inconclusive(Interval),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FloorResult {
    Value(BigInt),
    Inconclusive(Interval),
}

/// Encloses `x` at `q = 1, 2, 4, … ≤ 2^budget`, keeping the running
/// intersection, until it excludes zero.
pub(crate) fn sign_search(x: &AlmostHom, budget: Budget) -> (SignResult, Interval) {
    let mut q = BigInt::one();
    let mut running: Option<Interval> = None;
    for _ in 0..=budget.max_arg_exponent() {
        let e = x.enclose(&q).expect("q is positive");
        let cur = match running {
            // Both contain x; disjointness would mean a false certificate.
            Some(prev) => prev.intersect(&e).unwrap_or(e),
            None => e,
        };
        if cur.lo().is_positive() {
            return (SignResult::Positive, cur);
        }
        if cur.hi().is_negative() {
            return (SignResult::Negative, cur);
        }
        if cur.is_point() {
            return (SignResult::Inconclusive(cur.clone()), cur);
        }
        running = Some(cur);
        q <<= 1;
    }
    let e = running.expect("loop runs at least once");
    (SignResult::Inconclusive(e.clone()), e)
}

impl AlmostHom {
    pub fn sign(&self, budget: Budget) -> SignResult {
        sign_search(self, budget).0
    }

    /// `Value(n)` once some enclosure fits inside `[n, n+1)`.
    pub fn floor_of(&self, budget: Budget) -> FloorResult {
        if let Some(exact) = self.exact() {
            return FloorResult::Value(exact.floor_mul(&BigInt::one()));
        }
        let mut q = BigInt::one();
        let mut running = self.enclose(&q).expect("q is positive");
        let cap = budget.max_arg();
        loop {
            let n = floor_rat(running.lo());
            if running.hi() < &Rat::from_integer(&n + 1) {
                return FloorResult::Value(n);
            }
            if running.is_point() || q >= cap {
                break;
            }
            q <<= 1;
            let e = self.enclose(&q).expect("q is positive");
            running = running.intersect(&e).unwrap_or(e);
        }
        FloorResult::Inconclusive(running)
    }
}

/// Orders `x` against `y` through the sign of `y − x`.
pub fn compare(x: &AlmostHom, y: &AlmostHom, budget: Budget) -> Comparison {
    match (y - x).sign(budget) {
        SignResult::Positive => Comparison::Less,
        SignResult::Negative => Comparison::Greater,
        SignResult::Inconclusive(e) => Comparison::Inconclusive(e),
    }
}
