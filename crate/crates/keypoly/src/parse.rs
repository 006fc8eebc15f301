//! Parser for polynomial and series literals.
//!
//! Grammar (standard precedence `^` > `*`/`/` > `+`/`-`):
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := factor (("*" | "/") factor)*
//! factor   := atom ("^" exponent)?
//! atom     := INT | "t" | "x" | "(" expr ")"
//! exponent := INT | "(" INT ("/" INT)? ")"
//! ```
//!
//! Integer coefficients are reduced modulo `p`. `t` exponents may be
//! rational; their denominators must be representable in the target
//! field (a power of `p` for Puiseux series, 1 for rational functions).
//! `x` exponents must be non-negative integers. Division is only
//! defined by exactly invertible constants.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::field::{Coefficient, FieldError};
use crate::poly::Poly;
use crate::value::{ExtValue, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("exponent error at column {pos}: {msg}")]
    Exponent { pos: usize, msg: String },
}

impl ParseError {
    fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax {
            pos,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    T,
    X,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::T => write!(f, "t"),
            Tok::X => write!(f, "x"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = vec![];
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            't' => {
                out.push((i, Tok::T));
                i += 1;
            }
            'x' => {
                out.push((i, Tok::X));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = BigInt::from_str(&text[start..i])
                    .map_err(|e| ParseError::syntax(start, format!("bad integer: {e}")))?;
                out.push((start, Tok::Int(n)));
            }
            other => {
                return Err(ParseError::syntax(
                    i,
                    format!("unexpected character {other:?}"),
                ));
            }
        }
    }
    Ok(out)
}

struct Parser<'a, C: Coefficient> {
    p: u64,
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
    _marker: std::marker::PhantomData<C>,
}

impl<'a, C: Coefficient> Parser<'a, C> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(at, _)| *at)
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let at = self.here();
        match self.next() {
            Some(t) if *t == tok => Ok(()),
            Some(t) => Err(ParseError::syntax(
                at,
                format!("expected {tok:?}, found {t}"),
            )),
            None => Err(ParseError::syntax(
                at,
                format!("expected {tok:?}, found end of input"),
            )),
        }
    }

    fn expr(&mut self) -> Result<Poly<C>, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly<C>, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    let at = self.here();
                    self.next();
                    let divisor = self.factor()?;
                    acc = self.divide(acc, divisor, at)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn divide(&self, num: Poly<C>, den: Poly<C>, at: usize) -> Result<Poly<C>, ParseError> {
        if den.deg() != Some(0) {
            return Err(ParseError::syntax(
                at,
                "division is only defined by nonzero constants",
            ));
        }
        let inv = den
            .coeff(0)
            .invert(&ExtValue::PosInf)
            .map_err(|e| match e {
                FieldError::InexactInverse => ParseError::syntax(
                    at,
                    "divisor has no exact inverse in this field; use the rational-function field",
                ),
                other => ParseError::syntax(at, other.to_string()),
            })?;
        Ok(num.scale(&inv))
    }

    fn factor(&mut self) -> Result<Poly<C>, ParseError> {
        let at = self.here();
        let mut negate = false;
        while let Some(Tok::Minus) = self.peek() {
            self.next();
            negate = !negate;
        }
        let tok = match self.next() {
            Some(t) => t.clone(),
            None => {
                return Err(ParseError::syntax(
                    at,
                    "expected a term, found end of input",
                ))
            }
        };
        let base = match tok {
            Tok::Int(n) => {
                let p = BigInt::from(self.p);
                let r = ((&n % &p) + &p) % &p;
                let c = C::from_scalar(self.p, r.to_i64().unwrap_or(0));
                // integers never take rational exponents; integer powers only
                if let Some(Tok::Caret) = self.peek() {
                    self.next();
                    let (k, _) = self.nat_exponent()?;
                    return Ok(sign(Poly::constant(c).pow(k), negate));
                }
                Poly::constant(c)
            }
            Tok::T => {
                let exponent = if let Some(Tok::Caret) = self.peek() {
                    self.next();
                    self.rat_exponent()?
                } else {
                    (Rat::one(), at)
                };
                let (e, epos) = exponent;
                let c = C::t_power(self.p, &e).map_err(|err| ParseError::Exponent {
                    pos: epos,
                    msg: err.to_string(),
                })?;
                Poly::constant(c)
            }
            Tok::X => {
                if let Some(Tok::Caret) = self.peek() {
                    self.next();
                    let (k, _) = self.nat_exponent()?;
                    Poly::x(self.p).pow(k)
                } else {
                    Poly::x(self.p)
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                if let Some(Tok::Caret) = self.peek() {
                    self.next();
                    let (k, _) = self.nat_exponent()?;
                    inner.pow(k)
                } else {
                    inner
                }
            }
            other => {
                return Err(ParseError::syntax(at, format!("unexpected {other}")));
            }
        };
        Ok(sign(base, negate))
    }

    fn signed_int(&mut self) -> Result<(BigInt, usize), ParseError> {
        let at = self.here();
        let mut neg = false;
        while let Some(Tok::Minus) = self.peek() {
            self.next();
            neg = !neg;
        }
        match self.next() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                Ok((if neg { -n } else { n }, at))
            }
            Some(t) => Err(ParseError::syntax(
                at,
                format!("expected an integer, found {t}"),
            )),
            None => Err(ParseError::syntax(
                at,
                "expected an integer, found end of input",
            )),
        }
    }

    /// Exponent of `x` or a parenthesized expression: a non-negative integer.
    fn nat_exponent(&mut self) -> Result<(usize, usize), ParseError> {
        let at = self.here();
        let parens = matches!(self.peek(), Some(Tok::LParen));
        if parens {
            self.next();
        }
        let (n, npos) = self.signed_int()?;
        if parens {
            self.expect(Tok::RParen)?;
        }
        if n.is_negative() {
            return Err(ParseError::syntax(
                npos,
                "exponent must be non-negative here",
            ));
        }
        let k = n
            .to_usize()
            .ok_or_else(|| ParseError::syntax(npos, "exponent out of range"))?;
        Ok((k, at))
    }

    /// Exponent of `t`: an integer or a parenthesized rational.
    fn rat_exponent(&mut self) -> Result<(Rat, usize), ParseError> {
        let at = self.here();
        if matches!(self.peek(), Some(Tok::LParen)) {
            self.next();
            let (num, _) = self.signed_int()?;
            let den = if matches!(self.peek(), Some(Tok::Slash)) {
                self.next();
                let (d, dpos) = self.signed_int()?;
                if d.is_zero() {
                    return Err(ParseError::syntax(dpos, "zero denominator"));
                }
                d
            } else {
                BigInt::from(1)
            };
            self.expect(Tok::RParen)?;
            Ok((Rat::from_big(num, den), at))
        } else {
            let (n, _) = self.signed_int()?;
            Ok((Rat::from_big(n, BigInt::from(1)), at))
        }
    }
}

fn sign<C: Coefficient>(p: Poly<C>, negate: bool) -> Poly<C> {
    if negate {
        p.neg()
    } else {
        p
    }
}

/// Parse a polynomial literal over the field `C` with characteristic `p`.
pub fn parse_poly<C: Coefficient>(p: u64, text: &str) -> Result<Poly<C>, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser::<C> {
        p,
        toks: &toks,
        pos: 0,
        end: text.len(),
        _marker: std::marker::PhantomData,
    };
    let poly = parser.expr()?;
    if parser.pos != toks.len() {
        return Err(ParseError::syntax(parser.here(), "trailing input"));
    }
    Ok(poly)
}

/// Parse a constant literal (a field element).
pub fn parse_coeff<C: Coefficient>(p: u64, text: &str) -> Result<C, ParseError> {
    let poly = parse_poly::<C>(p, text)?;
    if poly.deg().map(|d| d > 0) == Some(true) {
        return Err(ParseError::syntax(0, "expected a constant, found x"));
    }
    Ok(poly.coeff(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::puiseux::PuiseuxSeries;
    use crate::field::ratfunc::RatFunc;

    #[test]
    fn scenario_polynomial_literal() {
        let f: Poly<PuiseuxSeries> = parse_poly(2, "x^2 + x + t^(-1)").unwrap();
        assert_eq!(f.deg(), Some(2));
        assert!(f.is_monic());
        assert_eq!(f.coeff(0), PuiseuxSeries::monomial(2, Rat::from_int(-1), 1));
        assert_eq!(f.to_string(), "x^2 + x + t^(-1)");
    }

    #[test]
    fn coefficients_reduce_mod_p() {
        let z: Poly<PuiseuxSeries> = parse_poly(3, "3*x").unwrap();
        assert!(z.is_zero());
        let w: Poly<PuiseuxSeries> = parse_poly(3, "-x").unwrap();
        assert_eq!(w, Poly::x(3).scale(&PuiseuxSeries::from_scalar(3, 2)));
    }

    #[test]
    fn exponent_denominator_must_fit_the_field() {
        let e = parse_poly::<PuiseuxSeries>(2, "t^(-1/6)").unwrap_err();
        assert!(matches!(e, ParseError::Exponent { .. }));
        let e = parse_poly::<RatFunc>(2, "t^(-1/2)").unwrap_err();
        assert!(matches!(e, ParseError::Exponent { .. }));
        assert!(parse_poly::<PuiseuxSeries>(2, "t^(-1/8)").is_ok());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_poly::<PuiseuxSeries>(2, "x^2 + + x").unwrap_err();
        match e {
            ParseError::Syntax { pos, .. } => assert_eq!(pos, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_poly::<PuiseuxSeries>(2, "x^-2").is_err());
        assert!(parse_poly::<PuiseuxSeries>(2, "y").is_err());
        assert!(parse_poly::<PuiseuxSeries>(2, "x^2 x").is_err());
    }

    #[test]
    fn display_round_trips() {
        let base_two = [
            "x^2 + x + t^(-1)",
            "(t^(-1/2) + t^(-1/4))*x^2 + x + 1",
            "t^(-1/2) + t^(-1/4) + 1",
            "0",
        ];
        for s in base_two {
            let f: Poly<PuiseuxSeries> = parse_poly(2, s).unwrap();
            let g: Poly<PuiseuxSeries> = parse_poly(2, &f.to_string()).unwrap();
            assert_eq!(f, g, "round trip failed for {s}");
        }
        let f: Poly<PuiseuxSeries> = parse_poly(3, "x^10 + 2*t*x + t^(3)").unwrap();
        let g: Poly<PuiseuxSeries> = parse_poly(3, &f.to_string()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn ratfunc_division_literal() {
        let f: Poly<RatFunc> = parse_poly(3, "(1 + t)/(t^(2))*x + 1").unwrap();
        assert_eq!(f.deg(), Some(1));
        let g: Poly<RatFunc> = parse_poly(3, &f.to_string()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn powers_and_parens() {
        let f: Poly<PuiseuxSeries> = parse_poly(2, "(x + 1)^3").unwrap();
        let x: Poly<PuiseuxSeries> = Poly::x(2);
        assert_eq!(f, x.add(&Poly::one(2)).pow(3));
        let g: Poly<PuiseuxSeries> = parse_poly(2, "t^2*x").unwrap();
        assert_eq!(
            g,
            Poly::x(2).scale(&PuiseuxSeries::monomial(2, Rat::from_int(2), 1))
        );
    }
}
