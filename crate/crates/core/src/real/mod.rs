//! Real numbers as certified almost homomorphisms `ℤ → ℤ`.
//!
//! A function `f: ℤ → ℤ` is an almost homomorphism when its defect
//! `d_f(p, q) = f(p+q) − f(p) − f(q)` is bounded. Two such functions
//! represent the same real when their difference is bounded, and the
//! real represented by `f` is `lim f(n)/n`. An [`AlmostHom`] pairs an
//! evaluation procedure with a certificate `C` such that
//! `|d_f(p, q)| ≤ C` for every `p, q`.
//!
//! # Enclosures
//!
//! Induction on `p` using `|d_f| ≤ C` gives
//!
//! ```text
//! |f(p·q) − p·f(q)| ≤ (|p| + 1)·C        for all p, q
//! ```
//!
//! (base case `|f(0)| = |d_f(0, 0)| ≤ C`; each step adds one defect).
//! Dividing by `|p|` and letting `p → ∞` gives `|q·x − f(q)| ≤ C`, so for
//! every `q ≥ 1` the represented real `x` lies in
//! `[(f(q) − C)/q, (f(q) + C)/q]`, an interval of width `2C/q`.
//!
//! Equality of reals is undecidable from finitely many values of `f`, so
//! there is no equality operation; ordering queries ([`AlmostHom::sign`],
//! [`compare`]) take a [`Budget`] and may come back inconclusive.

mod arith;
mod normal;
mod order;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use parking_lot::RwLock;

use crate::error::{Error, Result};
use crate::numeric::{ceil_rat, floor_div, isqrt, pow2, rat_int, round_half_even, Interval, Rat};

pub use normal::{digits, digits_by_enclosure, sup_finite};
pub(crate) use order::sign_search;
pub use order::{compare, Comparison, FloorResult, SignResult};

type EvalFn = dyn Fn(&BigInt) -> BigInt + Send + Sync;

/// Caps the evaluation arguments used while refining enclosures: `q` may
/// grow up to `2^max_arg_exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    max_arg_exponent: u32,
}

impl Budget {
    pub const DEFAULT_EXPONENT: u32 = 64;

    pub fn new(max_arg_exponent: u32) -> Result<Self> {
        if max_arg_exponent < 1 {
            return Err(Error::InvalidArgument(
                "budget exponent must be at least 1".into(),
            ));
        }
        Ok(Budget { max_arg_exponent })
    }

    pub fn max_arg_exponent(&self) -> u32 {
        self.max_arg_exponent
    }

    pub fn max_arg(&self) -> BigInt {
        pow2(self.max_arg_exponent)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_arg_exponent: Self::DEFAULT_EXPONENT,
        }
    }
}

/// Exact description of a real, tracked from constructors that know it.
///
/// A real carrying one is *floor-exact*: `⌊p·x⌋` can be computed exactly
/// for every `p`, which is what [`sup_finite`] and the exact paths of
/// [`digits`] rely on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactValue {
    Rational(Rat),
    /// `√n` for `n ≥ 0`.
    SqrtInt(BigInt),
}

impl ExactValue {
    /// `⌊p·x⌋`.
    pub fn floor_mul(&self, p: &BigInt) -> BigInt {
        match self {
            ExactValue::Rational(r) => (p * r.numer()).div_floor(r.denom()),
            ExactValue::SqrtInt(n) => {
                let sq = p * p * n;
                let root = isqrt(&sq).expect("p²n is nonnegative");
                if !p.is_negative() {
                    root
                } else if &root * &root == sq {
                    -root
                } else {
                    -root - 1
                }
            }
        }
    }

    pub fn as_rational(&self) -> Option<Rat> {
        match self {
            ExactValue::Rational(r) => Some(r.clone()),
            ExactValue::SqrtInt(n) => {
                let r = isqrt(n).expect("nonnegative");
                (&r * &r == *n).then(|| Rat::from_integer(r))
            }
        }
    }

    /// Exact comparison of the two described reals.
    pub fn cmp_exact(&self, other: &ExactValue) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        use ExactValue::*;
        // sign-aware comparison of a rational against √n
        fn rat_vs_sqrt(r: &Rat, n: &BigInt) -> Ordering {
            if r.is_negative() {
                return Ordering::Less;
            }
            (r * r).cmp(&Rat::from_integer(n.clone()))
        }
        match (self, other) {
            (Rational(a), Rational(b)) => a.cmp(b),
            (SqrtInt(a), SqrtInt(b)) => a.cmp(b),
            (Rational(a), SqrtInt(n)) => rat_vs_sqrt(a, n),
            (SqrtInt(n), Rational(a)) => rat_vs_sqrt(a, n).reverse(),
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Rational(r) => write!(f, "{r}"),
            ExactValue::SqrtInt(n) => write!(f, "sqrt({n})"),
        }
    }
}

struct Inner {
    label: String,
    cert: BigInt,
    exact: Option<ExactValue>,
    eval: Box<EvalFn>,
    memo: RwLock<HashMap<BigInt, BigInt>>,
}

/// One representative of a Eudoxus real, with its defect certificate.
///
/// Cloning is cheap (shared, reference counted). Evaluations are memoized;
/// racing inserts for the same argument store the same value.
#[derive(Clone)]
pub struct AlmostHom {
    inner: Arc<Inner>,
}

impl fmt::Debug for AlmostHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlmostHom")
            .field("label", &self.inner.label)
            .field("cert", &self.inner.cert)
            .field("exact", &self.inner.exact)
            .finish()
    }
}

impl AlmostHom {
    /// Wraps an arbitrary evaluation procedure with a claimed certificate.
    ///
    /// Nothing checks the claim; use [`crate::lemmas::certificate_audit`] to
    /// sample it. The procedure must be deterministic.
    pub fn new<F>(label: impl Into<String>, cert: BigInt, eval: F) -> Self
    where
        F: Fn(&BigInt) -> BigInt + Send + Sync + 'static,
    {
        Self::build(label.into(), cert, None, Box::new(eval))
    }

    fn build(label: String, cert: BigInt, exact: Option<ExactValue>, eval: Box<EvalFn>) -> Self {
        assert!(!cert.is_negative(), "certificate must be nonnegative");
        AlmostHom {
            inner: Arc::new(Inner {
                label,
                cert,
                exact,
                eval,
                memo: RwLock::new(HashMap::new()),
            }),
        }
    }

    pub(crate) fn with_exact(
        label: String,
        cert: BigInt,
        exact: Option<ExactValue>,
        eval: Box<EvalFn>,
    ) -> Self {
        Self::build(label, cert, exact, eval)
    }

    /// `p ↦ A·p`, the image of the integer `A`.
    pub fn eu_embed(a: impl Into<BigInt>) -> Self {
        let a: BigInt = a.into();
        let label = a.to_string();
        let exact = Some(ExactValue::Rational(Rat::from_integer(a.clone())));
        Self::build(label, BigInt::zero(), exact, Box::new(move |p| &a * p))
    }

    /// `p ↦ ⌊p·r⌋`. Its defect is `⌊u+v⌋ − ⌊u⌋ − ⌊v⌋ ∈ {0, 1}`.
    pub fn from_rational(r: Rat) -> Self {
        let label = if r.is_integer() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        };
        let (num, den) = (r.numer().clone(), r.denom().clone());
        Self::build(
            label,
            BigInt::one(),
            Some(ExactValue::Rational(r)),
            Box::new(move |p| floor_div(&(p * &num), &den).expect("denominator is positive")),
        )
    }

    /// `√n` as `p ↦ ⌊√(p²n)⌋` for `p ≥ 0`, extended oddly.
    ///
    /// On `p ≥ 0` this is `⌊p√n⌋` with defect in `{0, 1}`; the odd extension
    /// adds no new defect values, so the certificate is 1.
    pub fn sqrt_int(n: impl Into<BigInt>) -> Result<Self> {
        let n: BigInt = n.into();
        if n.is_negative() {
            return Err(Error::NegativeSqrt(n.to_string()));
        }
        let label = format!("sqrt({n})");
        let exact = Some(ExactValue::SqrtInt(n.clone()));
        Ok(Self::build(
            label,
            BigInt::one(),
            exact,
            Box::new(move |p| {
                let r = isqrt(&(p * p * &n)).expect("nonnegative");
                if p.is_negative() {
                    -r
                } else {
                    r
                }
            }),
        ))
    }

    /// Builds a representative from a rational approximation procedure:
    /// `approx(ε)` must lie within `ε` of the intended real `x`.
    ///
    /// `eval(p) = round(p·approx(1/(2|p|)))` (ties to even), `eval(0) = 0`.
    pub fn from_oracle<F>(label: impl Into<String>, approx: F) -> Self
    where
        F: Fn(&Rat) -> Rat + Send + Sync + 'static,
    {
        Self::from_oracle_exact(label.into(), None, approx)
    }

    pub(crate) fn from_oracle_exact<F>(label: String, exact: Option<ExactValue>, approx: F) -> Self
    where
        F: Fn(&Rat) -> Rat + Send + Sync + 'static,
    {
        // |p·approx − p·x| ≤ |p|·1/(2|p|) = 1/2 and rounding moves at most 1/2,
        // so |eval(p) − p·x| ≤ 1 for every p (trivially at p = 0). The defect
        // is (eval(p+q) − (p+q)x) − (eval(p) − px) − (eval(q) − qx), three
        // terms of size ≤ 1: certificate 3.
        Self::build(
            label,
            BigInt::from(3),
            exact,
            Box::new(move |p| {
                if p.is_zero() {
                    return BigInt::zero();
                }
                let eps = Rat::new(BigInt::one(), p.abs() * 2);
                let a = approx(&eps);
                round_half_even(&(a * Rat::from_integer(p.clone())))
            }),
        )
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn cert(&self) -> &BigInt {
        &self.inner.cert
    }

    pub fn exact(&self) -> Option<&ExactValue> {
        self.inner.exact.as_ref()
    }

    pub fn is_floor_exact(&self) -> bool {
        self.inner.exact.is_some()
    }

    pub fn eval(&self, p: &BigInt) -> BigInt {
        if let Some(v) = self.inner.memo.read().get(p) {
            return v.clone();
        }
        let v = (self.inner.eval)(p);
        self.inner.memo.write().insert(p.clone(), v.clone());
        v
    }

    pub fn eval_i64(&self, p: i64) -> BigInt {
        self.eval(&BigInt::from(p))
    }

    /// `d_f(p, q) = f(p+q) − f(p) − f(q)`.
    pub fn defect(&self, p: &BigInt, q: &BigInt) -> BigInt {
        self.eval(&(p + q)) - self.eval(p) - self.eval(q)
    }

    /// `[(f(q) − C)/q, (f(q) + C)/q]` for `q ≥ 1`; see the module docs.
    pub fn enclose(&self, q: &BigInt) -> Result<Interval> {
        if !q.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "enclosure argument must be positive, got {q}"
            )));
        }
        let center = Rat::new(self.eval(q), q.clone());
        let radius = Rat::new(self.inner.cert.clone(), q.clone());
        Ok(Interval::around(&center, &radius))
    }

    /// An enclosure of width at most `eps`, evaluated at
    /// `q = max(1, ⌈2C/eps⌉)`; fails when `q` is over budget.
    pub fn refine(&self, eps: &Rat, budget: Budget) -> Result<Interval> {
        if !eps.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "refinement width must be positive, got {eps}"
            )));
        }
        let q = ceil_rat(&(rat_int(self.inner.cert.clone() * 2) / eps)).max(BigInt::one());
        let cap = budget.max_arg();
        if q > cap {
            return Err(Error::BudgetExceeded {
                best: self.enclose(&cap)?,
            });
        }
        self.enclose(&q)
    }
}
