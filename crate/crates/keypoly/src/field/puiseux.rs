//! Level-bounded Puiseux series over the prime field, with per-element
//! precision tracking.
//!
//! An element is a finite sorted list of terms `c * t^e` with `c` in
//! `F_p \ {0}` and exponents whose denominators divide `p^m` for some
//! per-element level `m`, together with a precision order `pi`: the
//! element is known modulo terms of exponent `>= pi`. Exact elements
//! have `pi = inf`. Operations never invent unknown terms; anything
//! that would need them reports a precision loss instead.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Coefficient, FieldError, FieldKind};
use crate::fp;
use crate::value::{ExtValue, Rat};

#[derive(Clone, PartialEq, Eq)]
pub struct PuiseuxSeries {
    p: u64,
    terms: BTreeMap<Rat, u64>,
    precision: ExtValue,
}

impl PuiseuxSeries {
    pub fn zero(p: u64) -> Self {
        PuiseuxSeries {
            p,
            terms: BTreeMap::new(),
            precision: ExtValue::PosInf,
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Rat, u64)>>(p: u64, terms: I) -> Self {
        let mut s = PuiseuxSeries::zero(p);
        for (e, c) in terms {
            let c = c % p;
            if c == 0 {
                continue;
            }
            let entry = s.terms.entry(e).or_insert(0);
            *entry = fp::add(p, *entry, c);
        }
        s.normalize();
        s
    }

    pub fn monomial(p: u64, exponent: Rat, coeff: u64) -> Self {
        Self::from_terms(p, [(exponent, coeff)])
    }

    /// Restrict the precision to `precision` and drop terms beyond it.
    pub fn with_precision(mut self, precision: ExtValue) -> Self {
        if precision < self.precision {
            self.precision = precision;
        }
        self.normalize();
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, u64)> {
        self.terms.iter().map(|(e, c)| (e, *c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Smallest `m` such that every exponent denominator divides `p^m`.
    pub fn level(&self) -> u32 {
        let mut level = 0u32;
        for e in self.terms.keys() {
            let mut den = e.denom().clone();
            let p = BigInt::from(self.p);
            let mut k = 0u32;
            while !den.is_one() {
                let (q, r) = num_integer::Integer::div_rem(&den, &p);
                assert!(r.is_zero(), "exponent denominator not a power of p");
                den = q;
                k += 1;
            }
            level = level.max(k);
        }
        level
    }

    fn normalize(&mut self) {
        let precision = self.precision.clone();
        self.terms
            .retain(|e, c| !c.is_multiple_of(self.p) && ExtValue::Finite(e.clone()) < precision);
    }

    fn leading(&self) -> Option<(&Rat, u64)> {
        self.terms.iter().next().map(|(e, c)| (e, *c))
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.p);
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

    pub fn frobenius(&self) -> Self {
        self.pow(self.p)
    }
}

impl Coefficient for PuiseuxSeries {
    const KIND: FieldKind = FieldKind::PuiseuxFp;

    fn p(&self) -> u64 {
        self.p
    }

    fn zero(p: u64) -> Self {
        PuiseuxSeries::zero(p)
    }

    fn one(p: u64) -> Self {
        PuiseuxSeries::monomial(p, Rat::zero(), 1)
    }

    fn from_scalar(p: u64, c: i64) -> Self {
        PuiseuxSeries::monomial(p, Rat::zero(), fp::normalize(p, c))
    }

    fn t_power(p: u64, exponent: &Rat) -> Result<Self, FieldError> {
        let mut den = exponent.denom().clone();
        let pb = BigInt::from(p);
        while !den.is_one() {
            let (q, r) = num_integer::Integer::div_rem(&den, &pb);
            if !r.is_zero() {
                return Err(FieldError::Exponent {
                    exponent: exponent.clone(),
                    reason: format!("denominator is not a power of {p}"),
                });
            }
            den = q;
        }
        Ok(PuiseuxSeries::monomial(p, exponent.clone(), 1))
    }

    fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed characteristics");
        let mut out = PuiseuxSeries {
            p: self.p,
            terms: self.terms.clone(),
            precision: self.precision.clone().min(rhs.precision.clone()),
        };
        for (e, c) in &rhs.terms {
            let entry = out.terms.entry(e.clone()).or_insert(0);
            *entry = fp::add(self.p, *entry, *c);
        }
        out.normalize();
        out
    }

    fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = fp::sub(self.p, 0, *c);
        }
        out
    }

    fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed characteristics");
        if self.is_zero() || rhs.is_zero() {
            return PuiseuxSeries::zero(self.p);
        }
        let pa = self.precision.clone();
        let pb = rhs.precision.clone();
        let precision = pa
            .checked_add(&rhs.val_lower_bound())
            .unwrap_or(ExtValue::PosInf)
            .min(
                pb.checked_add(&self.val_lower_bound())
                    .unwrap_or(ExtValue::PosInf),
            );
        let mut out = PuiseuxSeries {
            p: self.p,
            terms: BTreeMap::new(),
            precision,
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.add(eb);
                if ExtValue::Finite(e.clone()) >= out.precision {
                    continue;
                }
                let entry = out.terms.entry(e).or_insert(0);
                *entry = fp::add(self.p, *entry, fp::mul(self.p, *ca, *cb));
            }
        }
        out.normalize();
        out
    }

    fn invert(&self, target: &ExtValue) -> Result<Self, FieldError> {
        let (v, lc) = match self.leading() {
            Some((e, c)) => (e.clone(), c),
            None => return Err(FieldError::ZeroDivisor),
        };
        let base = PuiseuxSeries::monomial(self.p, v.neg(), fp::inv(self.p, lc));
        // self * base = 1 - s with val(s) > 0, so the inverse is
        // base * (1 + s + s^2 + ...); sum until the tail clears `target`.
        let s = PuiseuxSeries::one(self.p).sub(&self.mul(&base));
        if s.is_zero() {
            return Ok(base);
        }
        let target_rat = match target {
            ExtValue::Finite(r) => r.clone(),
            ExtValue::NegInf => return Ok(base),
            ExtValue::PosInf => return Err(FieldError::InexactInverse),
        };
        let gap = match s.val_lower_bound() {
            ExtValue::Finite(g) => g,
            _ => return Ok(base),
        };
        assert!(
            !gap.is_negative() && !gap.is_zero(),
            "inverse gap must be positive"
        );
        // val(self * out - 1) >= cut, and cut >= gap keeps at least the
        // base term in the output.
        let cut = if target_rat > gap {
            ExtValue::Finite(target_rat)
        } else {
            ExtValue::Finite(gap)
        };
        let s = s.truncate_to(&cut);
        let mut acc = PuiseuxSeries::one(self.p).truncate_to(&cut);
        let mut power = s.clone();
        while power.term_count() > 0 {
            acc = acc.add(&power);
            power = power.mul(&s).truncate_to(&cut);
        }
        Ok(base.mul(&acc))
    }

    fn val(&self) -> Result<ExtValue, FieldError> {
        match self.leading() {
            Some((e, _)) => Ok(ExtValue::Finite(e.clone())),
            None => {
                if self.precision == ExtValue::PosInf {
                    Ok(ExtValue::PosInf)
                } else {
                    Err(FieldError::PrecisionLoss {
                        bound: self.precision.clone(),
                    })
                }
            }
        }
    }

    fn val_lower_bound(&self) -> ExtValue {
        match self.leading() {
            Some((e, _)) => ExtValue::Finite(e.clone()),
            None => self.precision.clone(),
        }
    }

    fn precision(&self) -> ExtValue {
        self.precision.clone()
    }

    fn truncate_to(&self, precision: &ExtValue) -> Self {
        self.clone().with_precision(precision.clone())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.precision == ExtValue::PosInf
    }

    fn summands(&self) -> Vec<Self> {
        self.terms
            .iter()
            .map(|(e, c)| PuiseuxSeries::monomial(self.p, e.clone(), *c))
            .collect()
    }

    fn canonical_key(&self) -> String {
        if self.precision == ExtValue::PosInf {
            format!("{}", self)
        } else {
            format!("{} + O(t^({}))", self, self.precision)
        }
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{c}")?;
            } else {
                if *c != 1 {
                    write!(f, "{c}*")?;
                }
                if *e == Rat::one() {
                    write!(f, "t")?;
                } else {
                    write!(f, "t^({e})")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_key())
    }
}
