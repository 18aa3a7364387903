//! Arithmetic expressions over exact reals.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | INT | INT '/' INT | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `INT '/' INT` with two adjacent integer literals (and a nonzero
//! denominator) is a rational literal; any other `/` is division. Both
//! readings denote the same value, so the rule only affects how the value
//! is represented.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::error::Error;
use crate::numeric::{ceil_rat, floor_rat, isqrt, pow2, Rat};
use crate::real::{sign_search, AlmostHom, Budget, SignResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprNode {
    IntLit(BigInt),
    RatLit(Rat),
    Sqrt(Box<ExprNode>),
    Neg(Box<ExprNode>),
    Add(Box<ExprNode>, Box<ExprNode>),
    Sub(Box<ExprNode>, Box<ExprNode>),
    Mul(Box<ExprNode>, Box<ExprNode>),
    Div(Box<ExprNode>, Box<ExprNode>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Sqrt,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Sqrt => f.write_str("'sqrt'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse().expect("ascii digits");
                out.push((Tok::Int(n), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word = &text[start..i];
                if word != "sqrt" {
                    return Err(ParseError {
                        offset: start,
                        message: format!("unknown identifier {word:?}"),
                    });
                }
                out.push((Tok::Sqrt, start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    message: format!("unexpected character {ch:?}"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let idx = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        ParseError {
            offset: self.offset(),
            message: format!("unexpected {}", self.peek()),
        }
    }

    fn expect_close(&mut self, open_at: usize) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(ParseError {
                offset: self.offset(),
                message: format!(
                    "unbalanced parentheses: expected ')' to close '(' at offset {open_at}, found {}",
                    self.peek()
                ),
            })
        }
    }

    fn expr(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = ExprNode::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = ExprNode::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = ExprNode::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = ExprNode::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<ExprNode, ParseError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(ExprNode::Neg(Box::new(self.factor()?)))
            }
            Tok::Int(n) => {
                self.bump();
                if let (Tok::Slash, Tok::Int(d)) = (self.peek(), self.peek_at(1)) {
                    if !d.is_zero() {
                        let d = d.clone();
                        self.bump();
                        self.bump();
                        return Ok(ExprNode::RatLit(Rat::new(n, d)));
                    }
                }
                Ok(ExprNode::IntLit(n))
            }
            Tok::Sqrt => {
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Err(ParseError {
                        offset: self.offset(),
                        message: format!("expected '(' after sqrt, found {}", self.peek()),
                    });
                }
                let open_at = self.offset();
                self.bump();
                let inner = self.expr()?;
                self.expect_close(open_at)?;
                Ok(ExprNode::Sqrt(Box::new(inner)))
            }
            Tok::LParen => {
                let open_at = self.offset();
                self.bump();
                let inner = self.expr()?;
                self.expect_close(open_at)?;
                Ok(inner)
            }
            _ => Err(self.unexpected()),
        }
    }
}

pub fn parse(text: &str) -> Result<ExprNode, ParseError> {
    let toks = lex(text)?;
    if toks.len() == 1 {
        return Err(ParseError {
            offset: 0,
            message: "empty input".into(),
        });
    }
    let mut parser = Parser { toks, pos: 0 };
    let node = parser.expr()?;
    match parser.peek() {
        Tok::End => Ok(node),
        Tok::RParen => Err(ParseError {
            offset: parser.offset(),
            message: "unbalanced parentheses: unmatched ')'".into(),
        }),
        _ => Err(parser.unexpected()),
    }
}

impl ExprNode {
    fn is_atom(&self) -> bool {
        matches!(
            self,
            ExprNode::IntLit(_) | ExprNode::RatLit(_) | ExprNode::Sqrt(_)
        )
    }
}

struct Operand<'a>(&'a ExprNode);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_atom() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

/// Prints text that parses back to the same tree.
impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprNode::IntLit(n) if n.is_negative() => write!(f, "-{}", n.abs()),
            ExprNode::IntLit(n) => write!(f, "{n}"),
            ExprNode::RatLit(r) if r.is_negative() => {
                write!(f, "-{}/{}", r.numer().abs(), r.denom())
            }
            ExprNode::RatLit(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ExprNode::Sqrt(e) => write!(f, "sqrt({e})"),
            ExprNode::Neg(e) => write!(f, "-{}", Operand(e)),
            ExprNode::Add(a, b) => write!(f, "{} + {}", Operand(a), Operand(b)),
            ExprNode::Sub(a, b) => write!(f, "{} - {}", Operand(a), Operand(b)),
            ExprNode::Mul(a, b) => write!(f, "{} * {}", Operand(a), Operand(b)),
            // a bare integer before '/' would be read back as a rational literal
            ExprNode::Div(a, b) if matches!(**a, ExprNode::IntLit(_)) => {
                write!(f, "({a}) / {}", Operand(b))
            }
            ExprNode::Div(a, b) => write!(f, "{} / {}", Operand(a), Operand(b)),
        }
    }
}

/// Builds the real denoted by `e`.
pub fn evaluate(e: &ExprNode, budget: Budget) -> Result<AlmostHom, Error> {
    Ok(match e {
        ExprNode::IntLit(n) => AlmostHom::eu_embed(n.clone()),
        ExprNode::RatLit(r) => AlmostHom::from_rational(r.clone()),
        ExprNode::Neg(a) => -evaluate(a, budget)?,
        ExprNode::Add(a, b) => &evaluate(a, budget)? + &evaluate(b, budget)?,
        ExprNode::Sub(a, b) => &evaluate(a, budget)? - &evaluate(b, budget)?,
        ExprNode::Mul(a, b) => &evaluate(a, budget)? * &evaluate(b, budget)?,
        ExprNode::Div(a, b) => {
            let num = evaluate(a, budget)?;
            let den = evaluate(b, budget)?.recip(budget)?;
            &num * &den
        }
        ExprNode::Sqrt(a) => match &**a {
            ExprNode::IntLit(n) => AlmostHom::sqrt_int(n.clone())?,
            other => sqrt_of(&evaluate(other, budget)?, budget)?,
        },
    })
}

pub fn evaluate_str(text: &str, budget: Budget) -> Result<AlmostHom, ExprError> {
    Ok(evaluate(&parse(text)?, budget)?)
}

/// Lower bound `s ≤ √v` with `s > 0`, for rational `v > 0`.
fn sqrt_lower_bound(v: &Rat) -> Rat {
    let mut k = 1u32;
    loop {
        let d = pow2(k);
        let r = isqrt(&floor_rat(&(v * Rat::from_integer(&d * &d)))).expect("nonnegative");
        if r.is_positive() {
            return Rat::new(r, d);
        }
        k += 4;
    }
}

/// `√y` for a provably positive `y`, via [`AlmostHom::from_oracle`].
///
/// Each approximation encloses `y` in `[lo, hi]` with `lo ≥ λ > 0`, brackets
/// `[√lo, √hi]` by scaled integer square roots, and tightens until the
/// bracket is at most `2ε` wide; its midpoint is then within `ε` of `√y`.
fn sqrt_of(y: &AlmostHom, budget: Budget) -> Result<AlmostHom, Error> {
    let (sign, enclosure) = sign_search(y, budget);
    match sign {
        SignResult::Positive => {}
        SignResult::Negative => return Err(Error::NegativeSqrt(y.label().to_string())),
        SignResult::Inconclusive(enclosure) => {
            return Err(Error::SqrtSignUndetermined { enclosure })
        }
    }
    let lambda = enclosure.lo().clone();
    let root_floor = sqrt_lower_bound(&lambda);
    let y2 = y.clone();
    let approx = move |eps: &Rat| {
        let mut width = eps * &root_floor;
        loop {
            let q = ceil_rat(&(Rat::from_integer(y2.cert() * 2) / &width)).max(BigInt::one());
            let e = y2.enclose(&q).expect("q is positive");
            let lo = e.lo().clone().max(lambda.clone());
            let hi = e.hi().clone().max(lo.clone());
            // scale D = 2^k with 1/D ≤ width
            let k = (ceil_rat(&width.recip()).bits() as u32) + 2;
            let d = pow2(k);
            let d2 = Rat::from_integer(&d * &d);
            let a_lo = Rat::new(
                isqrt(&floor_rat(&(&lo * &d2))).expect("nonnegative"),
                d.clone(),
            );
            let a_hi = Rat::new(isqrt(&ceil_rat(&(&hi * &d2))).expect("nonnegative") + 1, d);
            if &a_hi - &a_lo <= eps * Rat::from_integer(BigInt::from(2)) {
                return (a_lo + a_hi) / Rat::from_integer(BigInt::from(2));
            }
            width /= Rat::from_integer(BigInt::from(4));
        }
    };
    Ok(AlmostHom::from_oracle(
        format!("sqrt({})", y.label()),
        approx,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use crate::real::digits;
    use proptest::prelude::*;

    fn int(n: i64) -> Box<ExprNode> {
        Box::new(ExprNode::IntLit(BigInt::from(n)))
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse("1 + 2 * 3").unwrap(),
            ExprNode::Add(int(1), Box::new(ExprNode::Mul(int(2), int(3))))
        );
        assert_eq!(
            parse("1 - 2 - 3").unwrap(),
            ExprNode::Sub(Box::new(ExprNode::Sub(int(1), int(2))), int(3))
        );
    }

    #[test]
    fn rational_literals_and_division() {
        assert_eq!(
            parse("sqrt(2) - 3/2").unwrap(),
            ExprNode::Sub(
                Box::new(ExprNode::Sqrt(int(2))),
                Box::new(ExprNode::RatLit(rat(3, 2)))
            )
        );
        assert_eq!(parse(" 3 / 2 ").unwrap(), ExprNode::RatLit(rat(3, 2)));
        assert_eq!(parse("(3)/2").unwrap(), ExprNode::Div(int(3), int(2)));
        assert_eq!(
            parse("1/2/3").unwrap(),
            ExprNode::Div(Box::new(ExprNode::RatLit(rat(1, 2))), int(3))
        );
        assert_eq!(parse("1/0").unwrap(), ExprNode::Div(int(1), int(0)));
        assert_eq!(
            parse("-1/2").unwrap(),
            ExprNode::Neg(Box::new(ExprNode::RatLit(rat(1, 2))))
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let e = parse("(1 +").unwrap_err();
        assert_eq!(e.offset, 4);
        assert_eq!(parse("").unwrap_err().offset, 0);
        assert!(parse("   ").unwrap_err().message.contains("empty"));
        let e = parse("(1 + 2").unwrap_err();
        assert_eq!(e.offset, 6);
        assert!(e.message.contains("unbalanced"));
        let e = parse("1 + 2)").unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(e.message.contains("unbalanced"));
        assert_eq!(parse("2 $ 3").unwrap_err().offset, 2);
        assert_eq!(parse("cos(1)").unwrap_err().offset, 0);
        assert_eq!(parse("sqrt 2").unwrap_err().offset, 5);
        assert_eq!(parse("1 2").unwrap_err().offset, 2);
    }

    #[test]
    fn evaluation_examples() {
        let b = Budget::default();
        let five = evaluate_str("2 + 3", b).unwrap();
        assert!(five
            .enclose(&BigInt::from(10))
            .unwrap()
            .contains(&rat(5, 1)));

        let two = evaluate_str("sqrt(2)*sqrt(2)", b).unwrap();
        let d = digits(&two, 6, b).unwrap();
        assert!(
            d.starts_with("2.000000") || d.starts_with("1.999999"),
            "{d}"
        );

        match evaluate_str("1/(2-2)", b) {
            Err(ExprError::Eval(Error::SignUndetermined { .. })) => {}
            other => panic!("expected sign failure, got {other:?}"),
        }
        assert!(matches!(
            evaluate_str("sqrt(1-1)", b),
            Err(ExprError::Eval(Error::SqrtSignUndetermined { .. }))
        ));
        assert!(matches!(
            evaluate_str("sqrt(1-2)", b),
            Err(ExprError::Eval(Error::NegativeSqrt(_)))
        ));
        assert!(evaluate_str("sqrt(0)", b).is_ok());
    }

    #[test]
    fn sqrt_of_compound_operand() {
        let b = Budget::default();
        let x = evaluate_str("sqrt(1/2 + 3/2)", b).unwrap();
        assert!(!x.is_floor_exact());
        assert_eq!(x.cert(), &BigInt::from(3));
        let e = x.refine(&rat(1, 1_000_000), b).unwrap();
        // √2 ∈ (1.41421356, 1.41421357)
        let lo = rat(141_421_356, 100_000_000);
        let hi = rat(141_421_357, 100_000_000);
        assert!(e.lo() < &hi && e.hi() > &lo);
        assert!(e
            .intersect(&crate::numeric::Interval::new(lo, hi).unwrap())
            .is_some());

        let y = evaluate_str("sqrt(sqrt(16))", b).unwrap();
        let e = y.refine(&rat(1, 1000), b).unwrap();
        assert!(e.contains(&rat(2, 1)));
    }

    fn arb_expr() -> impl Strategy<Value = ExprNode> {
        let leaf = prop_oneof![
            (0i64..1000).prop_map(|n| ExprNode::IntLit(BigInt::from(n))),
            (0i64..100, 1i64..100).prop_map(|(n, d)| ExprNode::RatLit(rat(n, d))),
        ];
        leaf.prop_recursive(5, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| ExprNode::Sqrt(Box::new(e))),
                inner.clone().prop_map(|e| ExprNode::Neg(Box::new(e))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| ExprNode::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| ExprNode::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| ExprNode::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| ExprNode::Div(Box::new(a), Box::new(b))),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn print_then_parse_is_identity(e in arb_expr()) {
            let text = e.to_string();
            prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
        }
    }
}
