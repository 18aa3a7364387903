//! Exact integer, rational and interval arithmetic.
//!
//! Everything here is exact: rationals are kept reduced with a positive
//! denominator, so structural equality is value equality, and interval
//! endpoints never need outward rounding.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational in canonical form (reduced, denominator > 0).
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> Rat {
    Rat::from_integer(n.into())
}

pub fn checked_div(a: &Rat, b: &Rat) -> Result<Rat> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

/// `⌊a/b⌋` for `b > 0`: the unique `q` with `q·b ≤ a < (q+1)·b`.
pub fn floor_div(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    if !b.is_positive() {
        return Err(Error::NonPositiveDivisor(b.to_string()));
    }
    Ok(a.div_floor(b))
}

pub fn ceil_div(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    if !b.is_positive() {
        return Err(Error::NonPositiveDivisor(b.to_string()));
    }
    Ok(a.div_ceil(b))
}

/// `⌊√n⌋` by Newton iteration from an overestimate.
pub fn isqrt(n: &BigInt) -> Result<BigInt> {
    if n.is_negative() {
        return Err(Error::NegativeSqrt(n.to_string()));
    }
    if n < &BigInt::from(2) {
        return Ok(n.clone());
    }
    // 2^ceil(bits/2) > √n, and Newton decreases monotonically from above.
    let mut x = BigInt::one() << n.bits().div_ceil(2);
    loop {
        let y = (&x + n / &x) >> 1;
        if y >= x {
            return Ok(x);
        }
        x = y;
    }
}

pub fn floor_rat(r: &Rat) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil_rat(r: &Rat) -> BigInt {
    r.numer().div_ceil(r.denom())
}

/// Truncation toward zero.
pub fn trunc_rat(r: &Rat) -> BigInt {
    r.numer() / r.denom()
}

/// Nearest integer, ties to even.
pub fn round_half_even(r: &Rat) -> BigInt {
    let fl = floor_rat(r);
    let frac = r - Rat::from_integer(fl.clone());
    let half = rat(1, 2);
    match frac.cmp(&half) {
        std::cmp::Ordering::Less => fl,
        std::cmp::Ordering::Greater => fl + 1,
        std::cmp::Ordering::Equal => {
            if fl.is_even() {
                fl
            } else {
                fl + 1
            }
        }
    }
}

/// `2^e` as a big integer.
pub fn pow2(e: u32) -> BigInt {
    BigInt::one() << e as usize
}

pub fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// Formats a rational as `num/den`, always with an explicit denominator.
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let text = text.trim();
    let bad = || Error::InvalidArgument(format!("not a rational: {text:?}"));
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

/// Closed rational interval `[lo, hi]` with `lo ≤ hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rat,
    hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInterval {
                lo: fmt_rat(&lo),
                hi: fmt_rat(&hi),
            });
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(v: Rat) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    /// `[center − radius, center + radius]`; `radius` must be nonnegative.
    pub fn around(center: &Rat, radius: &Rat) -> Self {
        debug_assert!(!radius.is_negative());
        Interval {
            lo: center - radius,
            hi: center + radius,
        }
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / rat_int(2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rat) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().cloned().unwrap_or_else(Rat::zero);
        let hi = products.iter().max().cloned().unwrap_or_else(Rat::zero);
        Interval { lo, hi }
    }

    /// `None` when the intervals are disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", fmt_rat(&self.lo), fmt_rat(&self.hi))
    }
}
