use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{AlmostHom, Budget, ExactValue};
use crate::error::{Error, Result};
use crate::numeric::{ceil_rat, isqrt, pow10, rat, round_half_even, trunc_rat, Rat};

impl AlmostHom {
    /// Representative with certificate 3 for the same real, built with
    /// [`AlmostHom::from_oracle`] over enclosures of `self`.
    ///
    /// Fails when even a unit-width enclosure is over budget.
    pub fn canonicalize(&self, budget: Budget) -> Result<AlmostHom> {
        self.refine(&Rat::one(), budget)?;
        let x = self.clone();
        let approx = move |eps: &Rat| {
            // width 2C/q ≤ 2ε, so the midpoint is within ε
            let q = ceil_rat(&(Rat::from_integer(x.cert().clone()) / eps)).max(BigInt::one());
            x.enclose(&q).expect("q is positive").midpoint()
        };
        Ok(AlmostHom::from_oracle_exact(
            format!("canon({})", self.label()),
            self.exact().cloned(),
            approx,
        ))
    }
}

/// Supremum of a finite family of floor-exact reals.
///
/// `eval(p) = max_i ⌊p·x_i⌋` for `p ≥ 0`, extended oddly. For `p ≥ 0` this
/// is `⌊p·max x_i⌋`, whose defect lies in `{0, 1}`; the certificate
/// `1 + max C_i` leaves slack.
pub fn sup_finite(xs: &[AlmostHom]) -> Result<AlmostHom> {
    let mut exacts = Vec::with_capacity(xs.len());
    for x in xs {
        match x.exact() {
            Some(e) => exacts.push(e.clone()),
            None => return Err(Error::NotFloorExact(x.label().to_string())),
        }
    }
    let top = exacts
        .iter()
        .max_by(|a, b| a.cmp_exact(b))
        .cloned()
        .ok_or(Error::EmptyFamily)?;
    let cert = xs
        .iter()
        .map(|x| x.cert().clone())
        .max()
        .unwrap_or_default()
        + 1;
    let label = format!(
        "sup[{}]",
        xs.iter()
            .map(AlmostHom::label)
            .collect::<Vec<_>>()
            .join(",")
    );
    let nu_max = move |p: &BigInt| {
        exacts
            .iter()
            .map(|e| e.floor_mul(p))
            .max()
            .expect("family is nonempty")
    };
    Ok(AlmostHom::with_exact(
        label,
        cert,
        Some(top),
        Box::new(move |p| {
            if p.is_negative() {
                -nu_max(&-p)
            } else {
                nu_max(p)
            }
        }),
    ))
}

const ULP_MARKER: &str = "±1ulp";

/// Decimal approximation with `n` fractional digits, within `10⁻ⁿ` of `x`.
///
/// Floor-exact reals are truncated exactly. Otherwise see
/// [`digits_by_enclosure`].
pub fn digits(x: &AlmostHom, n: u32, budget: Budget) -> Result<String> {
    if n < 1 {
        return Err(Error::InvalidArgument(
            "digit count must be at least 1".into(),
        ));
    }
    match x.exact() {
        Some(ExactValue::Rational(r)) => Ok(format_scaled(
            &trunc_rat(&(r * Rat::from_integer(pow10(n)))),
            n,
        )),
        Some(ExactValue::SqrtInt(m)) => {
            let scaled = isqrt(&(m * pow10(2 * n))).expect("nonnegative");
            Ok(format_scaled(&scaled, n))
        }
        None => digits_by_enclosure(x, n, budget),
    }
}

/// Digits from an enclosure of width `≤ 10⁻ⁿ/2`, printed as the common
/// truncation of both endpoints.
///
/// When the enclosure straddles a digit boundary even after a few extra
/// refinements, the boundary itself is printed (it is within half an ulp
/// of `x`) followed by `±1ulp`, since the truncated digit is not pinned.
pub fn digits_by_enclosure(x: &AlmostHom, n: u32, budget: Budget) -> Result<String> {
    if n < 1 {
        return Err(Error::InvalidArgument(
            "digit count must be at least 1".into(),
        ));
    }
    let scale = Rat::from_integer(pow10(n));
    let mut eps = rat(1, 2) / &scale;
    let mut enclosure = x.refine(&eps, budget)?;
    for _ in 0..4 {
        let lo = trunc_rat(&(enclosure.lo() * &scale));
        let hi = trunc_rat(&(enclosure.hi() * &scale));
        if lo == hi {
            return Ok(format_scaled(&lo, n));
        }
        eps /= Rat::from_integer(BigInt::from(1 << 16));
        match x.refine(&eps, budget) {
            Ok(e) => enclosure = e,
            Err(Error::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    let lo = trunc_rat(&(enclosure.lo() * &scale));
    let hi = trunc_rat(&(enclosure.hi() * &scale));
    if lo == hi {
        return Ok(format_scaled(&lo, n));
    }
    let boundary = round_half_even(&(enclosure.midpoint() * &scale));
    Ok(format!("{}{ULP_MARKER}", format_scaled(&boundary, n)))
}

/// Prints `t / 10ⁿ` with exactly `n` fractional digits.
fn format_scaled(t: &BigInt, n: u32) -> String {
    let unit = pow10(n);
    let mag = t.abs();
    let int = &mag / &unit;
    let frac = (&mag % &unit).to_string();
    let sign = if t.is_negative() { "-" } else { "" };
    let pad = "0".repeat(n as usize - frac.len());
    if t.is_zero() {
        return format!("0.{}", "0".repeat(n as usize));
    }
    format!("{sign}{int}.{pad}{frac}")
}
