//! Exact rational numbers and the extended value domain used by every
//! valuation computation.
//!
//! Values live in `Q ∪ {+inf, -inf}`. `+inf` is the value of zero,
//! `-inf` is the level of a nonzero constant (the maximum over an empty
//! candidate set). All arithmetic is exact; there is no floating point
//! anywhere in this crate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("undefined sum: {0} + {1}")]
    UndefinedSum(ExtValue, ExtValue),
}

/// An exact rational, always in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn add(&self, rhs: &Rat) -> Rat {
        Rat(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &Rat) -> Rat {
        Rat(&self.0 - &rhs.0)
    }

    pub fn mul(&self, rhs: &Rat) -> Rat {
        Rat(&self.0 * &rhs.0)
    }

    pub fn neg(&self) -> Rat {
        Rat(-&self.0)
    }

    pub fn mul_int(&self, n: i64) -> Rat {
        Rat(&self.0 * BigInt::from(n))
    }

    /// Division by a positive integer; preserves order.
    pub fn div_nat(&self, n: u64) -> Rat {
        assert!(n > 0, "division by zero");
        Rat(&self.0 / BigInt::from(n))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = BigInt::from_str(num).map_err(|e| format!("bad numerator {num:?}: {e}"))?;
        let den = BigInt::from_str(den).map_err(|e| format!("bad denominator {den:?}: {e}"))?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Rat(BigRational::new(num, den)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An element of the extended value domain `Q ∪ {+inf, -inf}`.
///
/// The variant order gives the total order: `NegInf < Finite(_) < PosInf`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtValue {
    NegInf,
    Finite(Rat),
    PosInf,
}

impl ExtValue {
    pub fn zero() -> Self {
        ExtValue::Finite(Rat::zero())
    }

    pub fn from_int(n: i64) -> Self {
        ExtValue::Finite(Rat::from_int(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        ExtValue::Finite(Rat::new(num, den))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtValue::Finite(r) => Some(r),
            _ => None,
        }
    }

    /// Exact sum. `+inf` and `-inf` absorb finite values; mixing the two
    /// infinities is undefined.
    pub fn checked_add(&self, rhs: &ExtValue) -> Result<ExtValue, ValueError> {
        use ExtValue::*;
        match (self, rhs) {
            (PosInf, NegInf) | (NegInf, PosInf) => {
                Err(ValueError::UndefinedSum(self.clone(), rhs.clone()))
            }
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => Ok(Finite(a.add(b))),
        }
    }

    pub fn neg(&self) -> ExtValue {
        match self {
            ExtValue::NegInf => ExtValue::PosInf,
            ExtValue::PosInf => ExtValue::NegInf,
            ExtValue::Finite(r) => ExtValue::Finite(r.neg()),
        }
    }

    pub fn checked_sub(&self, rhs: &ExtValue) -> Result<ExtValue, ValueError> {
        self.checked_add(&rhs.neg())
    }

    /// Scalar multiple by a natural number. `0 * x = 0` for every `x`,
    /// including the infinities; this is the value of the empty product
    /// `Q^0` in expansion terms.
    pub fn mul_nat(&self, n: usize) -> ExtValue {
        if n == 0 {
            return ExtValue::zero();
        }
        match self {
            ExtValue::NegInf => ExtValue::NegInf,
            ExtValue::PosInf => ExtValue::PosInf,
            ExtValue::Finite(r) => ExtValue::Finite(r.mul_int(n as i64)),
        }
    }

    /// Scalar multiple by a signed integer; negative factors flip the
    /// infinities, zero gives zero.
    pub fn mul_int(&self, n: i64) -> ExtValue {
        if n == 0 {
            return ExtValue::zero();
        }
        match self {
            ExtValue::Finite(r) => ExtValue::Finite(r.mul_int(n)),
            ExtValue::PosInf => {
                if n > 0 {
                    ExtValue::PosInf
                } else {
                    ExtValue::NegInf
                }
            }
            ExtValue::NegInf => {
                if n > 0 {
                    ExtValue::NegInf
                } else {
                    ExtValue::PosInf
                }
            }
        }
    }

    /// Division by a positive integer; preserves order and fixes infinities.
    pub fn div_nat(&self, n: u64) -> ExtValue {
        assert!(n > 0, "division by zero");
        match self {
            ExtValue::NegInf => ExtValue::NegInf,
            ExtValue::PosInf => ExtValue::PosInf,
            ExtValue::Finite(r) => ExtValue::Finite(r.div_nat(n)),
        }
    }

    pub fn min_of<'a>(&'a self, rhs: &'a ExtValue) -> &'a ExtValue {
        if self <= rhs {
            self
        } else {
            rhs
        }
    }

    pub fn max_of<'a>(&'a self, rhs: &'a ExtValue) -> &'a ExtValue {
        if self >= rhs {
            self
        } else {
            rhs
        }
    }

    pub fn compare(&self, rhs: &ExtValue) -> Ordering {
        self.cmp(rhs)
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::NegInf => write!(f, "-inf"),
            ExtValue::PosInf => write!(f, "inf"),
            ExtValue::Finite(r) => write!(f, "{}", r),
        }
    }
}

impl fmt::Debug for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for ExtValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtValue::PosInf),
            "-inf" => Ok(ExtValue::NegInf),
            other => Ok(ExtValue::Finite(Rat::from_str(other)?)),
        }
    }
}

impl Serialize for ExtValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(n: i64, d: i64) -> ExtValue {
        ExtValue::from_ratio(n, d)
    }

    #[test]
    fn rational_addition() {
        assert_eq!(fin(1, 2).checked_add(&fin(1, 3)).unwrap(), fin(5, 6),);
        assert_eq!(fin(-1, 8).checked_add(&fin(-1, 8)).unwrap(), fin(-1, 4),);
    }

    #[test]
    fn infinity_absorbs() {
        assert_eq!(
            ExtValue::PosInf.checked_add(&fin(-7, 4)).unwrap(),
            ExtValue::PosInf,
        );
        assert_eq!(
            ExtValue::NegInf.checked_add(&fin(3, 1)).unwrap(),
            ExtValue::NegInf,
        );
    }

    #[test]
    fn mixed_infinities_are_undefined() {
        assert!(ExtValue::PosInf.checked_add(&ExtValue::NegInf).is_err());
        assert!(ExtValue::NegInf.checked_add(&ExtValue::PosInf).is_err());
    }

    #[test]
    fn total_order() {
        assert_eq!(
            ExtValue::NegInf.compare(&ExtValue::from_int(-1_000_000_000)),
            Ordering::Less,
        );
        assert_eq!(ExtValue::PosInf.min_of(&fin(3, 1)), &fin(3, 1));
        assert_eq!(fin(-1, 16).max_of(&fin(-1, 8)), &fin(-1, 16));
        assert!(ExtValue::NegInf < fin(0, 1));
        assert!(fin(0, 1) < ExtValue::PosInf);
    }

    #[test]
    fn scalar_ops() {
        assert_eq!(fin(-1, 16).mul_nat(2), fin(-1, 8));
        assert_eq!(ExtValue::PosInf.mul_nat(3), ExtValue::PosInf);
        assert_eq!(ExtValue::PosInf.mul_nat(0), ExtValue::zero());
        assert_eq!(fin(1, 2).div_nat(2), fin(1, 4));
        assert_eq!(ExtValue::NegInf.div_nat(5), ExtValue::NegInf);
    }

    #[test]
    fn display_round_trip() {
        for s in ["5/6", "-1/4", "0", "inf", "-inf", "17"] {
            let v: ExtValue = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
    }
}
