use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::order::sign_search;
use super::{AlmostHom, Budget, ExactValue, SignResult};
use crate::error::{Error, Result};
use crate::numeric::{ceil_rat, Rat};

/// Above this certificate, `mul` bounds `max |f(e)|` by the linear growth
/// estimate instead of enumerating every `e`.
const ENUMERATION_LIMIT: u32 = 1024;

fn exact_sum(x: &AlmostHom, y: &AlmostHom) -> Option<ExactValue> {
    match (x.exact()?.as_rational(), y.exact()?.as_rational()) {
        (Some(a), Some(b)) => Some(ExactValue::Rational(a + b)),
        _ => None,
    }
}

fn exact_neg(x: &AlmostHom) -> Option<ExactValue> {
    Some(ExactValue::Rational(-x.exact()?.as_rational()?))
}

fn exact_product(x: &AlmostHom, y: &AlmostHom) -> Option<ExactValue> {
    match (x.exact()?, y.exact()?) {
        (ExactValue::SqrtInt(a), ExactValue::SqrtInt(b)) => Some(ExactValue::SqrtInt(a * b)),
        (a, b) => Some(ExactValue::Rational(a.as_rational()? * b.as_rational()?)),
    }
}

impl AlmostHom {
    /// Pointwise sum; certificates add.
    pub fn plus(&self, other: &AlmostHom) -> AlmostHom {
        let (x, y) = (self.clone(), other.clone());
        AlmostHom::with_exact(
            format!("({}+{})", self.label(), other.label()),
            self.cert() + other.cert(),
            exact_sum(self, other),
            Box::new(move |p| x.eval(p) + y.eval(p)),
        )
    }

    pub fn negate(&self) -> AlmostHom {
        let x = self.clone();
        AlmostHom::with_exact(
            format!("-{}", self.label()),
            self.cert().clone(),
            exact_neg(self),
            Box::new(move |p| -x.eval(p)),
        )
    }

    pub fn minus(&self, other: &AlmostHom) -> AlmostHom {
        self.plus(&other.negate())
    }

    /// Product as composition: `p ↦ self(other(p))`.
    ///
    /// With `e = d_g(p, q)`,
    /// `d_{f∘g}(p, q) = f(e) + d_f(g(p)+g(q), e) + d_f(g(p), g(q))`, so the
    /// certificate is `max{|f(e)| : |e| ≤ C_g} + 2·C_f`. The maximum is found
    /// by enumeration for small `C_g`, otherwise bounded by
    /// `|f(e)| ≤ |e|·|f(1)| + (|e|+1)·C_f`.
    pub fn times(&self, other: &AlmostHom) -> AlmostHom {
        let cf = self.cert();
        let cg = other.cert();
        let max_f = if cg <= &BigInt::from(ENUMERATION_LIMIT) {
            let mut e = -cg.clone();
            let mut best = BigInt::zero();
            while &e <= cg {
                best = best.max(self.eval(&e).abs());
                e += 1;
            }
            best
        } else {
            cg * self.eval(&BigInt::one()).abs() + (cg + 1) * cf
        };
        let cert = max_f + cf * 2;
        let (f, g) = (self.clone(), other.clone());
        AlmostHom::with_exact(
            format!("({}*{})", self.label(), other.label()),
            cert,
            exact_product(self, other),
            Box::new(move |p| f.eval(&g.eval(p))),
        )
    }

    /// Multiplicative inverse; the sign must be certified within `budget`.
    pub fn recip(&self, budget: Budget) -> Result<AlmostHom> {
        let (sign, enclosure) = sign_search(self, budget);
        match sign {
            SignResult::Positive => Ok(recip_positive(self, enclosure.lo().clone())),
            SignResult::Negative => {
                let flipped = self.negate();
                let lambda = -enclosure.hi().clone();
                let r = recip_positive(&flipped, lambda);
                Ok(relabel(&r.negate(), format!("recip({})", self.label())))
            }
            SignResult::Inconclusive(enclosure) => Err(Error::SignUndetermined { enclosure }),
        }
    }
}

fn relabel(x: &AlmostHom, label: String) -> AlmostHom {
    let y = x.clone();
    AlmostHom::with_exact(
        label,
        x.cert().clone(),
        x.exact().cloned(),
        Box::new(move |p| y.eval(p)),
    )
}

/// Inverse of a positive `x` given a rational `0 < λ ≤ x`.
///
/// `g(p)` for `p > 0` is a crossing `n` with `f(n−1) < p ≤ f(n)` (the least
/// such `n` whenever `f` is non-decreasing), and `g(−p) = −g(p)`.
///
/// Certificate: `|f(n) − n·x| ≤ C` turns the crossing conditions into
/// `−C/x ≤ g(p) − p/x < C/x + 1` for `p ≥ 0`, so on nonnegative arguments
/// `|d_g| < 3C/x + 2`, and the odd extension adds no new defect values.
/// The value used, `⌈(K + C)/λ⌉ + 2` with `K = 2|f(1)| + 4C`, dominates
/// that bound because `λ ≤ x`.
fn recip_positive(x: &AlmostHom, lambda: Rat) -> AlmostHom {
    debug_assert!(lambda.is_positive());
    let c = x.cert().clone();
    let k = x.eval(&BigInt::one()).abs() * 2 + &c * 4;
    let cert = ceil_rat(&(Rat::from_integer(k + &c) / &lambda)) + 2;
    let f = x.clone();
    let exact = x
        .exact()
        .and_then(ExactValue::as_rational)
        .map(|r| ExactValue::Rational(r.recip()));
    AlmostHom::with_exact(
        format!("recip({})", x.label()),
        cert,
        exact,
        Box::new(move |p| {
            if p.is_zero() {
                BigInt::zero()
            } else if p.is_negative() {
                -crossing(&f, &lambda, &-p)
            } else {
                crossing(&f, &lambda, p)
            }
        }),
    )
}

/// Galloping search for a crossing of level `p > 0`, seeded at `p / rate`
/// where `rate` is the enclosure midpoint at `q = p` (or `λ` if larger).
pub(crate) fn crossing(f: &AlmostHom, lambda: &Rat, p: &BigInt) -> BigInt {
    let meets = |n: &BigInt| &f.eval(n) >= p;
    let zero = BigInt::zero();
    if meets(&zero) {
        return zero;
    }
    let rate = f
        .enclose(p)
        .map(|e| e.midpoint())
        .unwrap_or_else(|_| lambda.clone())
        .max(lambda.clone());
    let seed = ceil_rat(&(Rat::from_integer(p.clone()) / rate)).max(BigInt::one());

    // invariant once settled: !meets(lo), meets(hi), lo < hi
    let (mut lo, mut hi);
    if meets(&seed) {
        hi = seed;
        let mut step = BigInt::one();
        loop {
            let cand = &hi - &step;
            if !cand.is_positive() {
                lo = BigInt::zero();
                break;
            }
            if !meets(&cand) {
                lo = cand;
                break;
            }
            hi = cand;
            step *= 2;
        }
    } else {
        lo = seed;
        let mut step = BigInt::one();
        loop {
            let cand = &lo + &step;
            if meets(&cand) {
                hi = cand;
                break;
            }
            lo = cand;
            step *= 2;
        }
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if meets(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

impl Add for &AlmostHom {
    type Output = AlmostHom;
    fn add(self, rhs: &AlmostHom) -> AlmostHom {
        self.plus(rhs)
    }
}

impl Sub for &AlmostHom {
    type Output = AlmostHom;
    fn sub(self, rhs: &AlmostHom) -> AlmostHom {
        self.minus(rhs)
    }
}

impl Mul for &AlmostHom {
    type Output = AlmostHom;
    fn mul(self, rhs: &AlmostHom) -> AlmostHom {
        self.times(rhs)
    }
}

impl Neg for &AlmostHom {
    type Output = AlmostHom;
    fn neg(self) -> AlmostHom {
        self.negate()
    }
}

impl Neg for AlmostHom {
    type Output = AlmostHom;
    fn neg(self) -> AlmostHom {
        self.negate()
    }
}
