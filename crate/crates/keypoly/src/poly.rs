//! Polynomials in `x` over the coefficient field: arithmetic, Hasse
//! derivatives, Euclidean division, radix expansions in a monic base,
//! and Bezout inverses modulo an irreducible base.

use std::fmt;

use thiserror::Error;

use crate::field::{Coefficient, FieldError};
use crate::fp;
use crate::value::ExtValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("expansion base must be monic of positive degree")]
    InvalidBase,
    #[error("inputs are not coprime: gcd has degree {0}")]
    NotCoprime(usize),
    #[error("internal identity check failed: {0}")]
    Inexact(String),
}

/// A polynomial in `x`; `coeffs[i]` is the coefficient of `x^i`.
/// Certified-zero trailing coefficients are trimmed, so the leading
/// coefficient of a nonzero polynomial is never certified zero.
#[derive(Clone, PartialEq)]
pub struct Poly<C: Coefficient> {
    p: u64,
    coeffs: Vec<C>,
}

impl<C: Coefficient> Poly<C> {
    pub fn zero(p: u64) -> Self {
        Poly { p, coeffs: vec![] }
    }

    pub fn one(p: u64) -> Self {
        Poly::constant(C::one(p))
    }

    pub fn x(p: u64) -> Self {
        Poly {
            p,
            coeffs: vec![C::zero(p), C::one(p)],
        }
    }

    pub fn constant(c: C) -> Self {
        let p = c.p();
        let mut out = Poly { p, coeffs: vec![c] };
        out.trim();
        out
    }

    pub fn monomial(c: C, k: usize) -> Self {
        let p = c.p();
        let mut coeffs = vec![C::zero(p); k];
        coeffs.push(c);
        let mut out = Poly { p, coeffs };
        out.trim();
        out
    }

    pub fn from_coeffs(p: u64, coeffs: Vec<C>) -> Self {
        let mut out = Poly { p, coeffs };
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()) == Some(true) {
            self.coeffs.pop();
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map(|c| c.is_one()) == Some(true)
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| C::zero(self.p))
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed characteristics");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&rhs.coeff(i))).collect();
        Poly::from_coeffs(self.p, coeffs)
    }

    pub fn neg(&self) -> Self {
        Poly {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed characteristics");
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.p);
        }
        let mut coeffs = vec![C::zero(self.p); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Poly::from_coeffs(self.p, coeffs)
    }

    pub fn scale(&self, c: &C) -> Self {
        Poly::from_coeffs(self.p, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn mul_xk(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![C::zero(self.p); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { p: self.p, coeffs }
    }

    pub fn pow(&self, mut exp: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one(self.p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Hasse derivative of order `b`; order 0 is the identity.
    pub fn hasse_derivative(&self, b: usize) -> Self {
        if b == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(b)
            .map(|(i, c)| {
                let binom = fp::lucas_binom(self.p, i as u64, b as u64);
                if binom == 0 {
                    C::zero(self.p)
                } else if binom == 1 {
                    c.clone()
                } else {
                    c.mul(&C::from_scalar(self.p, binom as i64))
                }
            })
            .collect();
        Poly::from_coeffs(self.p, coeffs)
    }

    /// Horner evaluation at a field element.
    pub fn eval(&self, at: &C) -> C {
        let mut acc = C::zero(self.p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(c);
        }
        acc
    }

    /// The digits of the expansion of `self` in powers of `x - center`:
    /// digit `i` is the order-`i` Hasse derivative evaluated at `center`.
    pub fn taylor_digits(&self, center: &C) -> Vec<C> {
        let deg = match self.deg() {
            Some(d) => d,
            None => return vec![],
        };
        (0..=deg)
            .map(|i| self.hasse_derivative(i).eval(center))
            .collect()
    }

    /// Euclidean division `self = q * g + r` with `r = 0` or `deg r < deg g`.
    ///
    /// Over a truncated representation the leading coefficient of `g` must
    /// invert exactly (monic bases and monomial leads always do).
    pub fn euclid_divide(&self, g: &Self) -> Result<(Self, Self), PolyError> {
        let gdeg = g.deg().ok_or(PolyError::DivisionByZero)?;
        let lead_inv = if g.is_monic() {
            None
        } else {
            Some(
                g.leading()
                    .expect("nonzero divisor")
                    .invert(&ExtValue::PosInf)?,
            )
        };
        let mut rem = self.clone();
        let mut quo = Poly::zero(self.p);
        while let Some(rdeg) = rem.deg() {
            if rdeg < gdeg {
                break;
            }
            let mut c = rem.coeff(rdeg);
            if let Some(inv) = &lead_inv {
                c = c.mul(inv);
            }
            let step = Poly::monomial(c, rdeg - gdeg);
            quo = quo.add(&step);
            rem = rem.sub(&g.mul(&step));
            if rem.deg() == Some(rdeg) {
                // the leading term must cancel exactly
                let lead = rem.coeff(rdeg);
                return match lead.val() {
                    Err(e @ FieldError::PrecisionLoss { .. }) => Err(PolyError::Field(e)),
                    _ => Err(PolyError::Inexact(
                        "leading term did not cancel in division".into(),
                    )),
                };
            }
        }
        Ok((quo, rem))
    }

    /// The radix expansion of `self` in powers of a monic base `q`.
    ///
    /// ```
    /// use keypoly::{parse_poly, Poly, RatFunc};
    ///
    /// let f: Poly<RatFunc> = parse_poly(2, "x^4").unwrap();
    /// let q: Poly<RatFunc> = parse_poly(2, "x^2 + 1").unwrap();
    /// let e = f.q_expand(&q).unwrap();
    /// assert_eq!(e.digits.len(), 3);
    /// assert_eq!(e.reconstruct(), f);
    /// ```
    pub fn q_expand(&self, q: &Self) -> Result<QExpansion<C>, PolyError> {
        if !q.is_monic() || q.deg() == Some(0) || q.is_zero() {
            return Err(PolyError::InvalidBase);
        }
        let mut digits = vec![];
        let mut rest = self.clone();
        while !rest.is_zero() {
            let (quo, rem) = rest.euclid_divide(q)?;
            digits.push(rem);
            rest = quo;
        }
        Ok(QExpansion {
            base: q.clone(),
            digits,
        })
    }

    /// Inverse of `self` modulo a monic irreducible `q` (caller-asserted):
    /// returns `(inv, witness)` with `inv * self = 1 + witness * q` exactly
    /// and `deg inv < deg q`.
    pub fn bezout_inverse(&self, q: &Self) -> Result<(Self, Self), PolyError> {
        if self.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if !q.is_monic() || q.deg() == Some(0) || q.is_zero() {
            return Err(PolyError::InvalidBase);
        }
        // extended Euclid, tracking the coefficient of `self`
        let mut r0 = q.clone();
        let mut r1 = self.clone();
        let mut u0 = Poly::zero(self.p);
        let mut u1 = Poly::one(self.p);
        while !r1.is_zero() {
            if r1.deg() == Some(0) {
                break;
            }
            let (quo, rem) = r0.euclid_divide(&r1)?;
            let u2 = u0.sub(&quo.mul(&u1));
            r0 = r1;
            r1 = rem;
            u0 = u1;
            u1 = u2;
        }
        if r1.is_zero() {
            return Err(PolyError::NotCoprime(r0.deg().unwrap_or(0)));
        }
        let unit = r1.coeff(0).invert(&ExtValue::PosInf)?;
        let inv_raw = u1.scale(&unit);
        let (_, inv) = inv_raw.euclid_divide(q)?;
        let (witness, check) = inv.mul(self).sub(&Poly::one(self.p)).euclid_divide(q)?;
        if !check.is_zero() {
            return Err(PolyError::Inexact(
                "bezout identity residue is nonzero".into(),
            ));
        }
        Ok((inv, witness))
    }

    pub fn canonical_key(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .map(|(i, c)| format!("[{}]{}", i, c.canonical_key()))
            .collect();
        parts.join(" ")
    }
}

/// The expansion `f = sum digits[i] * base^i` with digit degrees below
/// `deg base`; reconstruction is exact.
#[derive(Clone)]
pub struct QExpansion<C: Coefficient> {
    pub base: Poly<C>,
    pub digits: Vec<Poly<C>>,
}

impl<C: Coefficient> QExpansion<C> {
    /// Degree of the expansion (index of the last digit).
    pub fn deg_q(&self) -> Option<usize> {
        self.digits.len().checked_sub(1)
    }

    pub fn digit(&self, i: usize) -> Poly<C> {
        self.digits
            .get(i)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.base.p()))
    }

    pub fn reconstruct(&self) -> Poly<C> {
        let p = self.base.p();
        let mut acc = Poly::zero(p);
        for digit in self.digits.iter().rev() {
            acc = acc.mul(&self.base).add(digit);
        }
        acc
    }
}

impl<C: Coefficient> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{c}")?;
                continue;
            }
            if !c.is_one() {
                let cs = c.to_string();
                if cs.contains(" + ") {
                    write!(f, "({cs})*")?;
                } else {
                    write!(f, "{cs}*")?;
                }
            }
            if i == 1 {
                write!(f, "x")?;
            } else {
                write!(f, "x^{i}")?;
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::puiseux::PuiseuxSeries;
    use crate::field::ratfunc::{RatFunc, TPoly};
    use crate::value::Rat;

    fn t_pow(p: u64, num: i64, den: i64) -> PuiseuxSeries {
        PuiseuxSeries::monomial(p, Rat::new(num, den), 1)
    }

    fn scenario_f(p: u64) -> Poly<PuiseuxSeries> {
        // x^p - x - t^(-1)
        let mut coeffs = vec![PuiseuxSeries::zero(p); p as usize + 1];
        coeffs[0] = t_pow(p, -1, 1).neg();
        coeffs[1] = PuiseuxSeries::from_scalar(p, -1);
        coeffs[p as usize] = PuiseuxSeries::one(p);
        Poly::from_coeffs(p, coeffs)
    }

    #[test]
    fn hasse_derivative_examples() {
        // d_3(x^3) = 1 over F_3, d_1(x^3) = 0 over F_3 (binom(3,1) = 3)
        let x3: Poly<RatFunc> = Poly::x(3).pow(3);
        assert_eq!(x3.hasse_derivative(3), Poly::one(3));
        assert!(x3.hasse_derivative(1).is_zero());

        // d_2(x^5) = 0 over F_2 (binom(5,2) = 10)
        let x5: Poly<RatFunc> = Poly::x(2).pow(5);
        assert!(x5.hasse_derivative(2).is_zero());

        // beyond the degree everything vanishes
        assert!(x3.hasse_derivative(4).is_zero());
    }

    #[test]
    fn q_expand_x4_base_x2_plus_1() {
        // x^4 = (x^2+1)^2 + 1 over F_2: digits [1, 0, 1]
        let f: Poly<RatFunc> = Poly::x(2).pow(4);
        let q = Poly::x(2).pow(2).add(&Poly::one(2));
        let e = f.q_expand(&q).unwrap();
        assert_eq!(e.digits.len(), 3);
        assert_eq!(e.digit(0), Poly::one(2));
        assert!(e.digit(1).is_zero());
        assert_eq!(e.digit(2), Poly::one(2));
        assert_eq!(e.reconstruct(), f);
    }

    #[test]
    fn q_expand_scenario_identity() {
        // x^2 + x + t^(-1) in base x + t^(-1/2) + t^(-1/4): digits [t^(-1/4), 1, 1]
        let p = 2;
        let f = scenario_f(p);
        let theta2 = t_pow(p, -1, 2).add(&t_pow(p, -1, 4));
        let q = Poly::from_coeffs(p, vec![theta2, PuiseuxSeries::one(p)]);
        let e = f.q_expand(&q).unwrap();
        assert_eq!(e.digits.len(), 3);
        assert_eq!(e.digit(0), Poly::constant(t_pow(p, -1, 4)));
        assert_eq!(e.digit(1), Poly::one(p));
        assert_eq!(e.digit(2), Poly::one(p));
        assert_eq!(e.reconstruct(), f);
    }

    #[test]
    fn q_expand_base_x_gives_coefficients() {
        let p = 2;
        let f = scenario_f(p);
        let e = f.q_expand(&Poly::x(p)).unwrap();
        for (i, d) in e.digits.iter().enumerate() {
            assert_eq!(d, &Poly::constant(f.coeff(i)));
        }
    }

    #[test]
    fn euclid_division_examples() {
        let p = 2;
        let f = scenario_f(p);
        let (q, r) = f.euclid_divide(&f).unwrap();
        assert_eq!(q, Poly::one(p));
        assert!(r.is_zero());

        // x^3 / (x - t) = (x^2 + t x + t^2, t^3)
        let p = 5;
        let x: Poly<PuiseuxSeries> = Poly::x(p);
        let t = t_pow(p, 1, 1);
        let g = x.sub(&Poly::constant(t.clone()));
        let (q, r) = x.pow(3).euclid_divide(&g).unwrap();
        assert_eq!(q, x.pow(2).add(&x.scale(&t)).add(&Poly::constant(t.pow(2))));
        assert_eq!(r, Poly::constant(t.pow(3)));
        assert_eq!(q.mul(&g).add(&r), x.pow(3));

        // (x^2 + 1) / x over F_2 = (x, 1)
        let x2: Poly<RatFunc> = Poly::x(2).pow(2).add(&Poly::one(2));
        let (q, r) = x2.euclid_divide(&Poly::x(2)).unwrap();
        assert_eq!(q, Poly::x(2));
        assert_eq!(r, Poly::one(2));
    }

    #[test]
    fn bezout_examples() {
        let p = 2;
        let q = scenario_f(p);

        let one: Poly<PuiseuxSeries> = Poly::one(p);
        let (inv, wit) = one.bezout_inverse(&q).unwrap();
        assert_eq!(inv, Poly::one(p));
        assert!(wit.is_zero());

        // a = x against q = x^2 + x + t^(-1): inv = t*x + t
        let x = Poly::x(p);
        let (inv, wit) = x.bezout_inverse(&q).unwrap();
        let t = t_pow(p, 1, 1);
        let expect = x.scale(&t).add(&Poly::constant(t.clone()));
        assert_eq!(inv, expect);
        assert_eq!(inv.mul(&x), Poly::one(p).add(&wit.mul(&q)),);
        assert_eq!(wit, Poly::constant(t));

        // constant a = t^(-1): inverse t
        let a = Poly::constant(t_pow(p, -1, 1));
        let (inv, wit) = a.bezout_inverse(&q).unwrap();
        assert_eq!(inv, Poly::constant(t_pow(p, 1, 1)));
        assert!(wit.is_zero());
    }

    #[test]
    fn bezout_rejects_common_factor() {
        let p = 2;
        let x: Poly<RatFunc> = Poly::x(p);
        let q = x.pow(2); // not irreducible; shares x with a = x
        assert!(matches!(
            x.bezout_inverse(&q),
            Err(PolyError::NotCoprime(1))
        ));
    }

    #[test]
    fn taylor_digits_match_linear_expansion() {
        let p = 3;
        let f = scenario_f(p);
        let theta = t_pow(p, -1, 3).add(&t_pow(p, -1, 9));
        let q = Poly::from_coeffs(p, vec![theta.neg(), PuiseuxSeries::one(p)]);
        let digits = f.taylor_digits(&theta);
        let e = f.q_expand(&q).unwrap();
        assert_eq!(digits.len(), e.digits.len());
        for (i, d) in digits.iter().enumerate() {
            assert_eq!(Poly::constant(d.clone()), e.digit(i));
        }
    }

    #[test]
    fn division_by_ratfunc_lead_is_exact() {
        let p = 3;
        // g with non-monic lead (1 + t) x^1 + ...
        let lead = RatFunc::from_poly(TPoly::from_coeffs(p, vec![1, 1]));
        let g = Poly::from_coeffs(p, vec![RatFunc::one(p), lead]);
        let f: Poly<RatFunc> = Poly::x(p).pow(3);
        let (q, r) = f.euclid_divide(&g).unwrap();
        assert_eq!(q.mul(&g).add(&r), f);
    }
}
