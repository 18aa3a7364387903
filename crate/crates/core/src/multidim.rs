//! Almost homomorphisms `ℤⁿ → ℤᵐ` and recovery of the real matrix they
//! represent.
//!
//! Over `ℤⁿ` a set is bounded exactly when it is finite, which for integer
//! vectors is the same as having bounded sup-norm; certificates here bound
//! `‖f(u+v) − f(u) − f(v)‖∞`. Each coordinate section `p ↦ f(p·e_j)_i` is a
//! one-dimensional almost homomorphism with the same certificate, and its
//! real is entry `(i, j)` of the matrix.
//!
//! Finite groups carry no almost homomorphisms up to bounded functions, so
//! torsion is not modelled.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use parking_lot::RwLock;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lemmas::AuditReport;
use crate::numeric::{fmt_rat, parse_rat, round_half_even, Interval, Rat};
use crate::real::{AlmostHom, Budget};

type MultiEvalFn = dyn Fn(&[BigInt]) -> Vec<BigInt> + Send + Sync;

/// Dense `rows × cols` matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Rat>>,
}

impl RatMatrix {
    pub fn new(entries: Vec<Vec<Rat>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch("matrix must be nonempty".into()));
        }
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(RatMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i][j]
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().flatten().all(Rat::is_integer)
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = (0..self.rows)
            .map(|i| {
                (0..other.cols)
                    .map(|j| {
                        (0..self.cols)
                            .map(|k| self.get(i, k) * other.get(k, j))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        RatMatrix::new(entries)
    }

    /// Grid text: a `m n` header then `m` lines of `n` rationals.
    pub fn parse_grid(text: &str) -> Result<Self> {
        let (rows, cols, body) = grid_header(text)?;
        let mut entries = Vec::with_capacity(rows);
        for (lineno, line) in body {
            let row = line
                .split_whitespace()
                .map(|tok| {
                    parse_rat(tok).map_err(|e| Error::Malformed {
                        line: lineno,
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != cols {
                return Err(Error::Malformed {
                    line: lineno,
                    message: format!("expected {cols} entries, found {}", row.len()),
                });
            }
            entries.push(row);
        }
        if entries.len() != rows {
            return Err(Error::Malformed {
                line: entries.len() + 2,
                message: format!("expected {rows} rows, found {}", entries.len()),
            });
        }
        RatMatrix::new(entries)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(fmt_rat).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

type GridBody<'a> = Vec<(usize, &'a str)>;

fn grid_header(text: &str) -> Result<(usize, usize, GridBody<'_>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (lineno, header) = lines.next().ok_or(Error::Malformed {
        line: 1,
        message: "missing `m n` header".into(),
    })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Malformed {
            line: lineno,
            message: format!("bad header {header:?}"),
        })?;
    match dims[..] {
        [m, n] if m > 0 && n > 0 => Ok((m, n, lines.collect())),
        _ => Err(Error::Malformed {
            line: lineno,
            message: format!("bad header {header:?}"),
        }),
    }
}

/// Grid of enclosures, one per matrix entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalMatrix {
    entries: Vec<Vec<Interval>>,
}

impl IntervalMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn get(&self, i: usize, j: usize) -> &Interval {
        &self.entries[i][j]
    }

    pub fn contains(&self, m: &RatMatrix) -> bool {
        m.rows() == self.rows()
            && m.cols() == self.cols()
            && (0..m.rows()).all(|i| (0..m.cols()).all(|j| self.get(i, j).contains(m.get(i, j))))
    }

    pub fn max_width(&self) -> Rat {
        self.entries
            .iter()
            .flatten()
            .map(Interval::width)
            .max()
            .unwrap_or_default()
    }

    /// Places `self` and `other` side by side (same row count).
    pub fn hconcat(&self, other: &IntervalMatrix) -> Result<IntervalMatrix> {
        if self.rows() != other.rows() {
            return Err(Error::DimensionMismatch("row counts differ".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        Ok(IntervalMatrix { entries })
    }

    /// Same grid layout as [`RatMatrix`], with `[lo,hi]` cells.
    pub fn parse_grid(text: &str) -> Result<Self> {
        let (rows, cols, body) = grid_header(text)?;
        let mut entries = Vec::with_capacity(rows);
        for (lineno, line) in body {
            let malformed = |message: String| Error::Malformed {
                line: lineno,
                message,
            };
            let row = line
                .split_whitespace()
                .map(|tok| {
                    let inner = tok
                        .strip_prefix('[')
                        .and_then(|t| t.strip_suffix(']'))
                        .ok_or_else(|| malformed(format!("bad cell {tok:?}")))?;
                    let (lo, hi) = inner
                        .split_once(',')
                        .ok_or_else(|| malformed(format!("bad cell {tok:?}")))?;
                    let lo = parse_rat(lo).map_err(|e| malformed(e.to_string()))?;
                    let hi = parse_rat(hi).map_err(|e| malformed(e.to_string()))?;
                    Interval::new(lo, hi).map_err(|e| malformed(e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != cols {
                return Err(malformed(format!(
                    "expected {cols} entries, found {}",
                    row.len()
                )));
            }
            entries.push(row);
        }
        if entries.len() != rows {
            return Err(Error::Malformed {
                line: entries.len() + 2,
                message: format!("expected {rows} rows, found {}", entries.len()),
            });
        }
        Ok(IntervalMatrix { entries })
    }
}

impl fmt::Display for IntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows(), self.cols())?;
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(Interval::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Result of [`MultiAH::recover_matrix`]: entries whose refinement ran over
/// budget keep their best enclosure and are listed in `unresolved`.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub matrix: IntervalMatrix,
    pub unresolved: Vec<(usize, usize)>,
}

impl Recovery {
    pub fn is_complete(&self) -> bool {
        self.unresolved.is_empty()
    }
}

struct MultiInner {
    label: String,
    dim_in: usize,
    dim_out: usize,
    cert: BigInt,
    eval: Box<MultiEvalFn>,
    memo: RwLock<HashMap<Vec<BigInt>, Vec<BigInt>>>,
}

/// Almost homomorphism `ℤⁿ → ℤᵐ` with a sup-norm defect certificate.
#[derive(Clone)]
pub struct MultiAH {
    inner: Arc<MultiInner>,
}

impl fmt::Debug for MultiAH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiAH")
            .field("label", &self.inner.label)
            .field("dim_in", &self.inner.dim_in)
            .field("dim_out", &self.inner.dim_out)
            .field("cert", &self.inner.cert)
            .finish()
    }
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic noise in `[−k, k]` keyed on `(seed, v, i)`.
fn noise(seed: u64, v: &[BigInt], i: usize, k: u64) -> BigInt {
    if k == 0 {
        return BigInt::zero();
    }
    let mut h = mix64(seed ^ 0x6575_646f_7875_7300);
    for c in v {
        let bytes = c.to_signed_bytes_le();
        h = mix64(h ^ bytes.len() as u64);
        for chunk in bytes.chunks(8) {
            let mut word = [0u8; 8];
            word[..chunk.len()].copy_from_slice(chunk);
            h = mix64(h ^ u64::from_le_bytes(word));
        }
    }
    h = mix64(h ^ i as u64);
    let span = 2 * k + 1;
    BigInt::from(h % span) - BigInt::from(k)
}

fn sup_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}

impl MultiAH {
    pub fn new<F>(
        label: impl Into<String>,
        dim_in: usize,
        dim_out: usize,
        cert: BigInt,
        eval: F,
    ) -> Self
    where
        F: Fn(&[BigInt]) -> Vec<BigInt> + Send + Sync + 'static,
    {
        assert!(!cert.is_negative(), "certificate must be nonnegative");
        MultiAH {
            inner: Arc::new(MultiInner {
                label: label.into(),
                dim_in,
                dim_out,
                cert,
                eval: Box::new(eval),
                memo: RwLock::new(HashMap::new()),
            }),
        }
    }

    /// The genuine homomorphism `v ↦ A·v` for an integer matrix `A`.
    pub fn linear(a: &RatMatrix) -> Result<Self> {
        if !a.is_integral() {
            return Err(Error::InvalidArgument(
                "linear lift needs an integer matrix".into(),
            ));
        }
        let rows: Vec<Vec<BigInt>> = a
            .entries
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer()).collect())
            .collect();
        Ok(Self::new(
            "linear",
            a.cols(),
            a.rows(),
            BigInt::zero(),
            move |v| {
                rows.iter()
                    .map(|r| r.iter().zip(v).map(|(a, x)| a * x).sum())
                    .collect()
            },
        ))
    }

    /// Integer lift of `v ↦ M·v`: each coordinate is the nearest integer
    /// (ties to even) plus seeded noise in `[−k, k]`; `eval(0) = 0`.
    ///
    /// Each coordinate is within `1/2 + k` of the linear value, so the
    /// defect's sup-norm is at most `3·(1/2 + k) ≤ 3·(1 + 2k)`. An integer
    /// matrix with `k = 0` lifts exactly and gets certificate 0.
    pub fn from_matrix_noisy(m: &RatMatrix, k: u64, seed: u64) -> Self {
        let cert = if k == 0 && m.is_integral() {
            BigInt::zero()
        } else {
            BigInt::from(3 * (1 + 2 * k))
        };
        let rows = m.entries.clone();
        Self::new(
            format!("noisy(k={k},seed={seed})"),
            m.cols(),
            m.rows(),
            cert,
            move |v| {
                if v.iter().all(Zero::is_zero) {
                    return vec![BigInt::zero(); rows.len()];
                }
                rows.iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let exact: Rat = r
                            .iter()
                            .zip(v)
                            .map(|(a, x)| a * Rat::from_integer(x.clone()))
                            .sum();
                        round_half_even(&exact) + noise(seed, v, i, k)
                    })
                    .collect()
            },
        )
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn dim_in(&self) -> usize {
        self.inner.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.inner.dim_out
    }

    pub fn cert(&self) -> &BigInt {
        &self.inner.cert
    }

    pub fn eval(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.inner.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "expected input of length {}, got {}",
                self.inner.dim_in,
                v.len()
            )));
        }
        Ok(self.eval_unchecked(v))
    }

    fn eval_unchecked(&self, v: &[BigInt]) -> Vec<BigInt> {
        if let Some(out) = self.inner.memo.read().get(v) {
            return out.clone();
        }
        let out = (self.inner.eval)(v);
        debug_assert_eq!(out.len(), self.inner.dim_out);
        self.inner.memo.write().insert(v.to_vec(), out.clone());
        out
    }

    /// `f(u+v) − f(u) − f(v)`.
    pub fn defect(&self, u: &[BigInt], v: &[BigInt]) -> Result<Vec<BigInt>> {
        let sum: Vec<BigInt> = u.iter().zip(v).map(|(a, b)| a + b).collect();
        let fs = self.eval(&sum)?;
        let fu = self.eval(u)?;
        let fv = self.eval(v)?;
        Ok(fs
            .into_iter()
            .zip(fu)
            .zip(fv)
            .map(|((s, a), b)| s - a - b)
            .collect())
    }

    /// `p ↦ f(p·e_j)_i`, with the same certificate.
    pub fn coordinate_section(&self, j: usize, i: usize) -> Result<AlmostHom> {
        if j >= self.dim_in() || i >= self.dim_out() {
            return Err(Error::IndexOutOfRange(format!(
                "section ({j},{i}) of a {}->{} map",
                self.dim_in(),
                self.dim_out()
            )));
        }
        let f = self.clone();
        let n = self.dim_in();
        Ok(AlmostHom::new(
            format!("{}[{i},{j}]", self.label()),
            self.cert().clone(),
            move |p: &BigInt| {
                let mut v = vec![BigInt::zero(); n];
                v[j] = p.clone();
                f.eval_unchecked(&v).swap_remove(i)
            },
        ))
    }

    /// Encloses every entry of the represented matrix to width `eps`.
    pub fn recover_matrix(&self, eps: &Rat, budget: Budget) -> Result<Recovery> {
        let mut unresolved = Vec::new();
        let mut entries = Vec::with_capacity(self.dim_out());
        for i in 0..self.dim_out() {
            let mut row = Vec::with_capacity(self.dim_in());
            for j in 0..self.dim_in() {
                let section = self.coordinate_section(j, i)?;
                match section.refine(eps, budget) {
                    Ok(iv) => row.push(iv),
                    Err(Error::BudgetExceeded { best }) => {
                        unresolved.push((i, j));
                        row.push(best);
                    }
                    Err(e) => return Err(e),
                }
            }
            entries.push(row);
        }
        Ok(Recovery {
            matrix: IntervalMatrix { entries },
            unresolved,
        })
    }

    /// Pointwise sum; certificates add.
    pub fn plus(&self, other: &MultiAH) -> Result<MultiAH> {
        if self.dim_in() != other.dim_in() || self.dim_out() != other.dim_out() {
            return Err(Error::DimensionMismatch(
                "sum of differently shaped maps".into(),
            ));
        }
        let (f, g) = (self.clone(), other.clone());
        Ok(MultiAH::new(
            format!("({}+{})", self.label(), other.label()),
            self.dim_in(),
            self.dim_out(),
            self.cert() + other.cert(),
            move |v| {
                f.eval_unchecked(v)
                    .into_iter()
                    .zip(g.eval_unchecked(v))
                    .map(|(a, b)| a + b)
                    .collect()
            },
        ))
    }

    /// `v ↦ L·f(v)` for an integer matrix `L` (a genuine homomorphism).
    /// The defect is `L·d_f`, bounded by the largest absolute row sum of
    /// `L` times the certificate.
    pub fn post_compose(&self, l: &RatMatrix) -> Result<MultiAH> {
        if !l.is_integral() || l.cols() != self.dim_out() {
            return Err(Error::DimensionMismatch(
                "post-composition needs an integer matrix with matching columns".into(),
            ));
        }
        let rows: Vec<Vec<BigInt>> = l
            .entries
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer()).collect())
            .collect();
        let row_norm = rows
            .iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_default();
        let f = self.clone();
        Ok(MultiAH::new(
            format!("L*{}", self.label()),
            self.dim_in(),
            l.rows(),
            row_norm * self.cert(),
            move |v| {
                let inner = f.eval_unchecked(v);
                rows.iter()
                    .map(|r| r.iter().zip(&inner).map(|(a, x)| a * x).sum())
                    .collect()
            },
        ))
    }

    /// `v ↦ f(L·v)` for an integer matrix `L`; `d_{f∘L}(u, v) = d_f(Lu, Lv)`,
    /// so the certificate carries over.
    pub fn pre_compose(&self, l: &RatMatrix) -> Result<MultiAH> {
        if !l.is_integral() || l.rows() != self.dim_in() {
            return Err(Error::DimensionMismatch(
                "pre-composition needs an integer matrix with matching rows".into(),
            ));
        }
        let rows: Vec<Vec<BigInt>> = l
            .entries
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer()).collect())
            .collect();
        let f = self.clone();
        Ok(MultiAH::new(
            format!("{}*L", self.label()),
            l.cols(),
            self.dim_out(),
            self.cert().clone(),
            move |v| {
                let w: Vec<BigInt> = rows
                    .iter()
                    .map(|r| r.iter().zip(v).map(|(a, x)| a * x).sum())
                    .collect();
                f.eval_unchecked(&w)
            },
        ))
    }

    /// Restrictions `f1(x) = f(x, 0)` and `f2(y) = f(0, y)`, plus the largest
    /// sampled `‖f(x, y) − f1(x) − f2(y)‖∞`, which is `‖d_f((x,0),(0,y))‖∞`
    /// and so never exceeds the certificate.
    pub fn split_direct_sum(
        &self,
        n1: usize,
        range: u64,
        samples: u64,
        seed: u64,
    ) -> Result<(MultiAH, MultiAH, BigInt)> {
        let n = self.dim_in();
        if n1 == 0 || n1 >= n {
            return Err(Error::InvalidArgument(format!(
                "split point {n1} outside 1..{n}"
            )));
        }
        let n2 = n - n1;
        let f = self.clone();
        let f1 = MultiAH::new(
            format!("{}|first", self.label()),
            n1,
            self.dim_out(),
            self.cert().clone(),
            move |x| {
                let mut v = x.to_vec();
                v.resize(n, BigInt::zero());
                f.eval_unchecked(&v)
            },
        );
        let f = self.clone();
        let f2 = MultiAH::new(
            format!("{}|second", self.label()),
            n2,
            self.dim_out(),
            self.cert().clone(),
            move |y| {
                let mut v = vec![BigInt::zero(); n1];
                v.extend_from_slice(y);
                f.eval_unchecked(&v)
            },
        );
        let vectors = sample_vectors(n, range, samples, seed);
        let worst = vectors
            .par_iter()
            .map(|v| {
                let whole = self.eval_unchecked(v);
                let a = f1.eval_unchecked(&v[..n1]);
                let b = f2.eval_unchecked(&v[n1..]);
                let diff: Vec<BigInt> = whole
                    .into_iter()
                    .zip(a)
                    .zip(b)
                    .map(|((w, a), b)| w - a - b)
                    .collect();
                sup_norm(&diff)
            })
            .max()
            .unwrap_or_default();
        Ok((f1, f2, worst))
    }
}

fn sample_vectors(n: usize, range: u64, count: u64, seed: u64) -> Vec<Vec<BigInt>> {
    let bound = range.min(i64::MAX as u64) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..n)
                .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
                .collect()
        })
        .collect()
}

/// Sup-norm defect audit over seeded pairs of vectors in `[−range, range]ⁿ`.
pub fn multi_certificate_audit(
    f: &MultiAH,
    range: u64,
    samples: u64,
    seed: u64,
) -> Result<AuditReport> {
    if range < 1 {
        return Err(Error::InvalidArgument(
            "audit range must be at least 1".into(),
        ));
    }
    let us = sample_vectors(f.dim_in(), range, samples, seed);
    let vs = sample_vectors(f.dim_in(), range, samples, seed.wrapping_add(1));
    let max = us
        .par_iter()
        .zip(vs.par_iter())
        .map(|(u, v)| f.defect(u, v).map(|d| sup_norm(&d)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or_default();
    Ok(AuditReport {
        label: f.label().to_string(),
        samples,
        violated: &max > f.cert(),
        max_defect_observed: max,
        cert_claimed: f.cert().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn mat(rows: &[&[(i64, i64)]]) -> RatMatrix {
        RatMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn identity2() -> RatMatrix {
        mat(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]])
    }

    fn example() -> RatMatrix {
        mat(&[&[(2, 1), (0, 1)], &[(1, 1), (3, 1)]])
    }

    #[test]
    fn sections_of_identity() {
        let f = MultiAH::from_matrix_noisy(&identity2(), 0, 0);
        let s00 = f.coordinate_section(0, 0).unwrap();
        let s01 = f.coordinate_section(0, 1).unwrap();
        let one = AlmostHom::eu_embed(1);
        for p in -50..=50 {
            assert_eq!(s00.eval_i64(p), one.eval_i64(p));
            assert_eq!(s01.eval_i64(p), big(0));
        }
        assert!(f.coordinate_section(2, 0).is_err());
        assert!(f.coordinate_section(0, 2).is_err());
    }

    #[test]
    fn noiseless_integer_lift_is_exact() {
        let f = MultiAH::from_matrix_noisy(&example(), 0, 0);
        assert_eq!(f.cert(), &big(0));
        assert_eq!(f.eval(&[big(3), big(-2)]).unwrap(), vec![big(6), big(-3)]);
        let rec = f.recover_matrix(&rat(1, 100), Budget::default()).unwrap();
        assert!(rec.is_complete());
        for i in 0..2 {
            for j in 0..2 {
                assert!(rec.matrix.get(i, j).is_point());
            }
        }
        assert!(rec.matrix.contains(&example()));
    }

    #[test]
    fn half_rounds_to_neighbouring_integer() {
        let f = MultiAH::from_matrix_noisy(&mat(&[&[(1, 2)]]), 0, 0);
        let v = f.eval(&[big(3)]).unwrap()[0].clone();
        assert!(v == big(1) || v == big(2));
        assert_eq!(f.cert(), &big(3));
    }

    #[test]
    fn noisy_lift_recovers_entries() {
        let m = example();
        for seed in 0..5 {
            let f = MultiAH::from_matrix_noisy(&m, 5, seed);
            let rec = f.recover_matrix(&rat(1, 100), Budget::default()).unwrap();
            assert!(rec.is_complete());
            assert!(rec.matrix.contains(&m), "seed {seed}");
            assert!(rec.matrix.max_width() <= rat(1, 100));
        }
    }

    #[test]
    fn one_by_one_recovery_matches_core_refine() {
        let m = mat(&[&[(7, 2)]]);
        let f = MultiAH::from_matrix_noisy(&m, 1, 3);
        let eps = rat(1, 1000);
        let rec = f.recover_matrix(&eps, Budget::default()).unwrap();
        let direct = f
            .coordinate_section(0, 0)
            .unwrap()
            .refine(&eps, Budget::default())
            .unwrap();
        assert_eq!(rec.matrix.get(0, 0), &direct);
        assert!(direct.contains(&rat(7, 2)));
    }

    #[test]
    fn budget_overrun_marks_entries() {
        let f = MultiAH::from_matrix_noisy(&example(), 5, 0);
        let rec = f
            .recover_matrix(&rat(1, 1_000_000), Budget::new(4).unwrap())
            .unwrap();
        assert_eq!(rec.unresolved.len(), 4);
        assert!(rec.matrix.contains(&example()));
    }

    #[test]
    fn noisy_audit_never_violates() {
        let m = mat(&[&[(1, 3), (-5, 2), (7, 1)], &[(2, 9), (0, 1), (-1, 4)]]);
        let f = MultiAH::from_matrix_noisy(&m, 5, 0);
        let report = multi_certificate_audit(&f, 1000, 10_000, 0).unwrap();
        assert!(!report.violated, "{report}");
    }

    #[test]
    fn direct_sum_split() {
        let exact = MultiAH::linear(&mat(&[&[(1, 1), (2, 1), (-1, 1)]])).unwrap();
        let (_, _, worst) = exact.split_direct_sum(1, 1000, 500, 0).unwrap();
        assert_eq!(worst, big(0));

        let m = mat(&[&[(2, 1), (1, 3), (5, 7)], &[(-1, 2), (3, 1), (0, 1)]]);
        let f = MultiAH::from_matrix_noisy(&m, 4, 9);
        let (f1, f2, worst) = f.split_direct_sum(2, 1000, 2000, 1).unwrap();
        assert!(&worst <= f.cert());
        let eps = rat(1, 100);
        let left = f1.recover_matrix(&eps, Budget::default()).unwrap().matrix;
        let right = f2.recover_matrix(&eps, Budget::default()).unwrap().matrix;
        assert!(left.hconcat(&right).unwrap().contains(&m));

        assert!(f.split_direct_sum(0, 10, 10, 0).is_err());
        assert!(f.split_direct_sum(3, 10, 10, 0).is_err());
    }

    #[test]
    fn sum_of_lifts_stays_within_summed_certificate() {
        let a = MultiAH::from_matrix_noisy(&example(), 2, 1);
        let b = MultiAH::from_matrix_noisy(&identity2(), 3, 2);
        let s = a.plus(&b).unwrap();
        assert_eq!(s.cert(), &(a.cert() + b.cert()));
        let report = multi_certificate_audit(&s, 500, 5000, 4).unwrap();
        assert!(!report.violated);
    }

    #[test]
    fn composition_with_linear_map_recovers_product() {
        let m = mat(&[&[(1, 2), (3, 1)], &[(-2, 3), (1, 5)], &[(4, 1), (0, 1)]]);
        let l = mat(&[&[(1, 1), (-1, 1), (2, 1)], &[(0, 1), (3, 1), (1, 1)]]);
        let f = MultiAH::from_matrix_noisy(&m, 5, 11);
        let g = f.post_compose(&l).unwrap();
        let product = l.mul(&m).unwrap();
        let rec = g.recover_matrix(&rat(1, 100), Budget::default()).unwrap();
        assert!(rec.matrix.contains(&product));

        let r = mat(&[&[(1, 1), (1, 1)], &[(0, 1), (2, 1)]]);
        let h = f.pre_compose(&r).unwrap();
        let rec = h.recover_matrix(&rat(1, 100), Budget::default()).unwrap();
        assert!(rec.matrix.contains(&m.mul(&r).unwrap()));
    }

    #[test]
    fn grid_round_trip() {
        let text = "2 3\n1/2 -3 4/6\n0 7/1 -1/9\n";
        let m = RatMatrix::parse_grid(text).unwrap();
        assert_eq!(m.get(0, 2), &rat(2, 3));
        assert_eq!(RatMatrix::parse_grid(&m.to_string()).unwrap(), m);
        assert_eq!(m.to_string(), "2 3\n1/2 -3/1 2/3\n0/1 7/1 -1/9\n");

        let rec = MultiAH::from_matrix_noisy(&m, 1, 0)
            .recover_matrix(&rat(1, 10), Budget::default())
            .unwrap();
        let printed = rec.matrix.to_string();
        assert_eq!(IntervalMatrix::parse_grid(&printed).unwrap(), rec.matrix);
    }

    #[test]
    fn malformed_grids() {
        for bad in [
            "",
            "2\n1 2\n",
            "1 2\n1\n",
            "2 1\n1\n",
            "1 1\nx\n",
            "1 1\n1/0\n",
            "0 3\n",
        ] {
            assert!(
                matches!(RatMatrix::parse_grid(bad), Err(Error::Malformed { .. })),
                "{bad:?}"
            );
        }
        assert!(IntervalMatrix::parse_grid("1 1\n[2/1,1/1]\n").is_err());
    }
}
