//! Executable forms of the supporting lemmas, plus certificate audits.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::real::{AlmostHom, Budget, SignResult};

/// Extends `h: ℕ → ℤ` to `ℤ` by `f(p) = −h(−p)` for `p < 0`.
///
/// If `|h(m+n) − h(m) − h(n)| ≤ cert_n` on `ℕ`, the extension has the same
/// bound everywhere: two negative arguments negate a nonnegative defect, and
/// for mixed signs `|d_f(p, q)| = |d_f(a, b)|` with `a, b ≥ 0` (`a = q,
/// b = −(p+q)` when `p + q ≤ 0`, else `a = p + q, b = −p`, for `p < 0`).
pub fn odd_extend<H>(label: impl Into<String>, h: H, cert_n: BigInt) -> Result<AlmostHom>
where
    H: Fn(&BigInt) -> BigInt + Send + Sync + 'static,
{
    let h0 = h(&BigInt::zero());
    if !h0.is_zero() {
        return Err(Error::NonzeroAtOrigin(h0.to_string()));
    }
    Ok(AlmostHom::new(label, cert_n, move |p: &BigInt| {
        if p.is_negative() {
            -h(&-p)
        } else {
            h(p)
        }
    }))
}

/// Smallest `M > 0` with `f(M) > 2·(C + D)`, for positive `x = [f]`.
///
/// With `E = C + D`, induction on `f((m+1)M) ≥ f(mM) + f(M) − C` gives
/// `f(mM) > (m+1)E ≥ (m+1)D` for all `m ≥ 1`.
pub fn lower_bound_scale(x: &AlmostHom, d: &BigInt, budget: Budget) -> Result<BigInt> {
    if !d.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "D must be positive, got {d}"
        )));
    }
    match x.sign(budget) {
        SignResult::Positive => {}
        SignResult::Negative => {
            return Err(Error::InvalidArgument(format!("{} is negative", x.label())))
        }
        SignResult::Inconclusive(enclosure) => return Err(Error::SignUndetermined { enclosure }),
    }
    let threshold = (x.cert() + d) * 2;
    let cap = budget.max_arg();
    let mut m = BigInt::one();
    while m <= cap {
        if x.eval(&m) > threshold {
            return Ok(m);
        }
        m += 1;
    }
    Err(Error::BudgetExceeded {
        best: x.enclose(&cap)?,
    })
}

/// Samples `f(m·M) > (m+1)·D` for `m = 1..=m_max`.
pub fn growth_scaling_holds(x: &AlmostHom, scale: &BigInt, d: &BigInt, m_max: u64) -> bool {
    (1..=m_max).all(|m| {
        let m = BigInt::from(m);
        x.eval(&(&m * scale)) > (m + 1) * d
    })
}

/// `(A, B) = (C + |f(1)|, 3C)`, so that `|f(p)| ≤ A·|p| + B`.
pub fn upper_bound_coeffs(x: &AlmostHom) -> (BigInt, BigInt) {
    let c = x.cert();
    (c + x.eval(&BigInt::one()).abs(), c * 3)
}

pub fn linear_growth_holds(x: &AlmostHom, p: &BigInt) -> bool {
    let (a, b) = upper_bound_coeffs(x);
    x.eval(p).abs() <= a * p.abs() + b
}

/// `|p·f(q) − q·f(p)| ≤ (|p| + |q| + 2)·C`.
pub fn check_mult_lemma(x: &AlmostHom, p: &BigInt, q: &BigInt) -> bool {
    let lhs = (p * x.eval(q) - q * x.eval(p)).abs();
    lhs <= (p.abs() + q.abs() + 2) * x.cert()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub label: String,
    pub samples: u64,
    pub max_defect_observed: BigInt,
    pub cert_claimed: BigInt,
    pub violated: bool,
}

impl fmt::Display for AuditReport {
    /// `label cert max_observed samples verdict`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label: String = self
            .label
            .chars()
            .map(|c| if c.is_whitespace() { '_' } else { c })
            .collect();
        let verdict = if self.violated { "violated" } else { "ok" };
        write!(
            f,
            "{} {} {} {} {}",
            label, self.cert_claimed, self.max_defect_observed, self.samples, verdict
        )
    }
}

const GRID_RADIUS: i64 = 10;

/// Evaluates `|d_f|` on `samples` seeded pseudorandom pairs in
/// `[−range, range]²` plus the grid `[−r, r]²` with `r = min(range, 10)`.
pub fn certificate_audit(
    x: &AlmostHom,
    range: u64,
    samples: u64,
    seed: u64,
) -> Result<AuditReport> {
    if range < 1 {
        return Err(Error::InvalidArgument(
            "audit range must be at least 1".into(),
        ));
    }
    let bound =
        i64::try_from(range).map_err(|_| Error::InvalidArgument("range too large".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(i64, i64)> = (0..samples)
        .map(|_| (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound)))
        .collect();
    let r = bound.min(GRID_RADIUS);
    for p in -r..=r {
        for q in -r..=r {
            pairs.push((p, q));
        }
    }
    let max = pairs
        .par_iter()
        .map(|&(p, q)| x.defect(&BigInt::from(p), &BigInt::from(q)).abs())
        .max()
        .unwrap_or_default();
    Ok(AuditReport {
        label: x.label().to_string(),
        samples: pairs.len() as u64,
        violated: &max > x.cert(),
        max_defect_observed: max,
        cert_claimed: x.cert().clone(),
    })
}

/// `g_m(p) = 0` for `|p| ≤ m`, `m·p` otherwise; represents the integer `m`.
///
/// `g_m = (p ↦ m·p) − b` with `b(p) = m·p·[|p| ≤ m]`, so
/// `d = b(p) + b(q) − b(p+q)`. Case analysis on which of `p, q, p+q` are
/// small shows `|d| ≤ 2m²`, attained at `p = q = m`.
pub fn street_family(m: impl Into<BigInt>) -> Result<AlmostHom> {
    let m: BigInt = m.into();
    if m < BigInt::one() {
        return Err(Error::InvalidArgument(format!(
            "m must be at least 1, got {m}"
        )));
    }
    let cert = &m * &m * 2;
    let label = format!("street({m})");
    Ok(AlmostHom::new(label, cert, move |p: &BigInt| {
        if p.abs() <= m {
            BigInt::zero()
        } else {
            &m * p
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{floor_div, isqrt, rat};

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn odd_extend_examples() {
        let f = odd_extend("2m", |m: &BigInt| m * 2, big(0)).unwrap();
        assert_eq!(f.eval_i64(-3), big(-6));

        let g = odd_extend("sqrt2", |m: &BigInt| isqrt(&(m * m * 2)).unwrap(), big(1)).unwrap();
        let s = AlmostHom::sqrt_int(2).unwrap();
        for p in -200..=200 {
            assert_eq!(g.eval_i64(p), s.eval_i64(p));
        }

        assert!(matches!(
            odd_extend("bad", |m: &BigInt| m + 1, big(0)),
            Err(Error::NonzeroAtOrigin(_))
        ));
    }

    #[test]
    fn odd_extend_of_floor_three_sevenths_keeps_unit_defect() {
        let f = odd_extend(
            "3/7",
            |m: &BigInt| floor_div(&(m * 3), &big(7)).unwrap(),
            big(1),
        )
        .unwrap();
        let mut worst = big(0);
        for p in -60..=60 {
            for q in -60..=60 {
                worst = worst.max(f.defect(&big(p), &big(q)).abs());
                assert_eq!(f.eval_i64(p), -f.eval_i64(-p));
            }
        }
        assert_eq!(worst, big(1));
    }

    #[test]
    fn lower_bound_scale_examples() {
        let b = Budget::default();
        assert_eq!(
            lower_bound_scale(&AlmostHom::eu_embed(5), &big(1), b).unwrap(),
            big(1)
        );
        let s = AlmostHom::sqrt_int(2).unwrap();
        // threshold 2·(1 + 3) = 8; isqrt(72) = 8, isqrt(98) = 9
        let m = lower_bound_scale(&s, &big(3), b).unwrap();
        assert_eq!(m, big(7));
        assert!(growth_scaling_holds(&s, &m, &big(3), 100));
        assert!(lower_bound_scale(&AlmostHom::eu_embed(-1), &big(1), b).is_err());
        assert!(lower_bound_scale(&AlmostHom::eu_embed(0), &big(1), b).is_err());
    }

    #[test]
    fn lower_bound_scale_on_small_positive_reals() {
        let b = Budget::default();
        for (n, d) in [(1, 100), (3, 7), (22, 7), (1, 2)] {
            let x = AlmostHom::from_rational(rat(n, d));
            for dd in [1, 5, 40] {
                let m = lower_bound_scale(&x, &big(dd), b).unwrap();
                assert!(
                    growth_scaling_holds(&x, &m, &big(dd), 100),
                    "{n}/{d} D={dd}"
                );
            }
        }
    }

    #[test]
    fn upper_bound_examples() {
        assert_eq!(
            upper_bound_coeffs(&AlmostHom::eu_embed(7)),
            (big(7), big(0))
        );
        assert_eq!(
            upper_bound_coeffs(&AlmostHom::sqrt_int(2).unwrap()),
            (big(2), big(3))
        );
    }

    #[test]
    fn mult_lemma_examples() {
        let s = AlmostHom::sqrt_int(2).unwrap();
        let e = AlmostHom::eu_embed(-4);
        for p in -300..=300 {
            assert!(check_mult_lemma(&s, &big(p), &big(p)));
            for q in (-300..=300).step_by(7) {
                assert!(check_mult_lemma(&s, &big(p), &big(q)));
                assert!(check_mult_lemma(&e, &big(p), &big(q)));
            }
        }
    }

    #[test]
    fn audit_examples() {
        let r = certificate_audit(&AlmostHom::eu_embed(9), 1000, 2000, 0).unwrap();
        assert_eq!(r.max_defect_observed, big(0));
        assert!(!r.violated);
        assert_eq!(r.samples, 2000 + 21 * 21);

        let half = AlmostHom::from_rational(rat(1, 2));
        let lying = AlmostHom::new("half-cert0", big(0), move |p: &BigInt| half.eval(p));
        let r = certificate_audit(&lying, 100, 500, 0).unwrap();
        assert!(r.violated);
        assert_eq!(r.max_defect_observed, big(1));

        assert!(certificate_audit(&lying, 0, 1, 0).is_err());
    }

    #[test]
    fn audit_is_deterministic_per_seed() {
        let x = street_family(4).unwrap();
        let a = certificate_audit(&x, 500, 3000, 7).unwrap();
        let b = certificate_audit(&x, 500, 3000, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn audit_line_format() {
        let r = AuditReport {
            label: "sqrt(2) * x".into(),
            samples: 10,
            max_defect_observed: big(1),
            cert_claimed: big(3),
            violated: false,
        };
        assert_eq!(r.to_string(), "sqrt(2)_*_x 3 1 10 ok");
    }

    #[test]
    fn street_examples() {
        let g = street_family(3).unwrap();
        assert_eq!(g.eval_i64(3), big(0));
        assert_eq!(g.eval_i64(4), big(12));
        assert_eq!(g.eval_i64(-4), big(-12));
        assert!(street_family(0).is_err());
    }

    #[test]
    fn street_certificate_is_exact_maximum() {
        // |d| depends only on which of p, q, p+q are within m, so the box
        // [-3m-1, 3m+1]² realises every defect value.
        for m in 1..=8i64 {
            let g = street_family(m).unwrap();
            let r = 3 * m + 1;
            let mut worst = big(0);
            for p in -r..=r {
                for q in -r..=r {
                    worst = worst.max(g.defect(&big(p), &big(q)).abs());
                }
            }
            assert_eq!(&worst, g.cert(), "m = {m}");
        }
    }
}
