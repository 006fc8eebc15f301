//! The field `F_p(t)` with the `t`-adic valuation, represented exactly as
//! reduced fractions of polynomials in `t`. No precision tracking is
//! needed; every operation is exact.

use std::fmt;

use num_traits::Signed;

use super::{Coefficient, FieldError, FieldKind};
use crate::fp;
use crate::value::{ExtValue, Rat};

/// A polynomial in `t` over the prime field, coefficients ascending.
#[derive(Clone, PartialEq, Eq)]
pub struct TPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl TPoly {
    pub fn zero(p: u64) -> Self {
        TPoly { p, coeffs: vec![] }
    }

    pub fn one(p: u64) -> Self {
        TPoly { p, coeffs: vec![1] }
    }

    pub fn from_coeffs(p: u64, coeffs: Vec<u64>) -> Self {
        let mut t = TPoly {
            p,
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
        };
        t.trim();
        t
    }

    pub fn t_pow(p: u64, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = 1;
        TPoly { p, coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Order of vanishing at `t = 0`.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != 0)
    }

    pub fn lead(&self) -> u64 {
        *self.coeffs.last().expect("leading coefficient of zero")
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut coeffs = vec![0u64; self.coeffs.len().max(rhs.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] = *c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] = fp::add(self.p, coeffs[i], *c);
        }
        let mut out = TPoly { p: self.p, coeffs };
        out.trim();
        out
    }

    pub fn neg(&self) -> Self {
        TPoly {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| fp::sub(self.p, 0, *c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return TPoly::zero(self.p);
        }
        let mut coeffs = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = fp::add(self.p, coeffs[i + j], fp::mul(self.p, *a, *b));
            }
        }
        let mut out = TPoly { p: self.p, coeffs };
        out.trim();
        out
    }

    pub fn scale(&self, c: u64) -> Self {
        TPoly {
            p: self.p,
            coeffs: if c.is_multiple_of(self.p) {
                vec![]
            } else {
                self.coeffs.iter().map(|a| fp::mul(self.p, *a, c)).collect()
            },
        }
    }

    pub fn divrem(&self, rhs: &Self) -> (Self, Self) {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        let dlead_inv = fp::inv(self.p, rhs.lead());
        let mut rem = self.clone();
        let mut quo = vec![0u64; self.coeffs.len().saturating_sub(rhs.coeffs.len() - 1)];
        while !rem.is_zero() && rem.coeffs.len() >= rhs.coeffs.len() {
            let shift = rem.coeffs.len() - rhs.coeffs.len();
            let c = fp::mul(self.p, rem.lead(), dlead_inv);
            quo[shift] = c;
            for (i, b) in rhs.coeffs.iter().enumerate() {
                rem.coeffs[shift + i] =
                    fp::sub(self.p, rem.coeffs[shift + i], fp::mul(self.p, c, *b));
            }
            rem.trim();
        }
        let mut q = TPoly {
            p: self.p,
            coeffs: quo,
        };
        q.trim();
        (q, rem)
    }

    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(fp::inv(self.p, self.lead()))
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (k, *c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}*t")?,
                (k, 1) => write!(f, "t^({k})")?,
                (k, c) => write!(f, "{c}*t^({k})")?,
            }
        }
        Ok(())
    }
}

/// A reduced fraction `num/den` with `den` monic and `gcd(num, den) = 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    p: u64,
    num: TPoly,
    den: TPoly,
}

impl RatFunc {
    pub fn from_parts(num: TPoly, den: TPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let p = den.p;
        let mut out = RatFunc { p, num, den };
        out.reduce();
        out
    }

    pub fn from_poly(num: TPoly) -> Self {
        let p = num.p;
        RatFunc {
            p,
            num,
            den: TPoly::one(p),
        }
    }

    pub fn num(&self) -> &TPoly {
        &self.num
    }

    pub fn den(&self) -> &TPoly {
        &self.den
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = TPoly::one(self.p);
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.deg() != Some(0) {
            self.num = self.num.divrem(&g).0;
            self.den = self.den.divrem(&g).0;
        }
        let scale = fp::inv(self.p, self.den.lead());
        self.num = self.num.scale(scale);
        self.den = self.den.scale(scale);
    }
}

impl Coefficient for RatFunc {
    const KIND: FieldKind = FieldKind::RationalFunctionFp;

    fn p(&self) -> u64 {
        self.p
    }

    fn zero(p: u64) -> Self {
        RatFunc::from_poly(TPoly::zero(p))
    }

    fn one(p: u64) -> Self {
        RatFunc::from_poly(TPoly::one(p))
    }

    fn from_scalar(p: u64, c: i64) -> Self {
        RatFunc::from_poly(TPoly::from_coeffs(p, vec![fp::normalize(p, c)]))
    }

    fn t_power(p: u64, exponent: &Rat) -> Result<Self, FieldError> {
        if !num_traits::One::is_one(exponent.denom()) {
            return Err(FieldError::Exponent {
                exponent: exponent.clone(),
                reason: "fractional exponents need the Puiseux field".into(),
            });
        }
        let n = exponent.numer();
        let k: usize = n.abs().try_into().map_err(|_| FieldError::Exponent {
            exponent: exponent.clone(),
            reason: "exponent out of range".into(),
        })?;
        if n.is_negative() {
            Ok(RatFunc::from_parts(TPoly::one(p), TPoly::t_pow(p, k)))
        } else {
            Ok(RatFunc::from_poly(TPoly::t_pow(p, k)))
        }
    }

    fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed characteristics");
        RatFunc::from_parts(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    fn neg(&self) -> Self {
        RatFunc {
            p: self.p,
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed characteristics");
        RatFunc::from_parts(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    fn invert(&self, _target: &ExtValue) -> Result<Self, FieldError> {
        if self.num.is_zero() {
            return Err(FieldError::ZeroDivisor);
        }
        Ok(RatFunc::from_parts(self.den.clone(), self.num.clone()))
    }

    fn val(&self) -> Result<ExtValue, FieldError> {
        Ok(self.val_lower_bound())
    }

    fn val_lower_bound(&self) -> ExtValue {
        match self.num.ord() {
            None => ExtValue::PosInf,
            Some(n) => {
                let d = self.den.ord().unwrap_or(0);
                ExtValue::from_int(n as i64 - d as i64)
            }
        }
    }

    fn precision(&self) -> ExtValue {
        ExtValue::PosInf
    }

    fn truncate_to(&self, _precision: &ExtValue) -> Self {
        self.clone()
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn summands(&self) -> Vec<Self> {
        if self.den.deg() == Some(0) {
            self.num
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(k, c)| RatFunc::from_poly(TPoly::t_pow(self.p, k).scale(*c)))
                .collect()
        } else {
            vec![self.clone()]
        }
    }

    fn canonical_key(&self) -> String {
        format!("{}", self)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.deg() == Some(0) {
            write!(f, "{}", self.num)
        } else if self.num.deg() == Some(0)
            || self.num.coeffs.iter().filter(|c| **c != 0).count() == 1
        {
            write!(f, "{}/({})", self.num, self.den)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
