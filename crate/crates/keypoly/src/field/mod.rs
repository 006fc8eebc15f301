//! Coefficient fields: level-bounded Puiseux series over a prime field,
//! and rational functions in `t` for exact unit-test arithmetic.

use std::fmt;

use thiserror::Error;

use crate::fp;
use crate::value::{ExtValue, Rat};

pub mod puiseux;
pub mod ratfunc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// `K = ∪_m F_p((t^(1/p^m)))`, precision-tracked.
    PuiseuxFp,
    /// `F_p(t)` with the `t`-adic valuation, represented exactly.
    RationalFunctionFp,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::PuiseuxFp => write!(f, "puiseux"),
            FieldKind::RationalFunctionFp => write!(f, "rational-function"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub kind: FieldKind,
}

impl FieldSpec {
    pub fn new(p: u64, kind: FieldKind) -> Result<Self, FieldError> {
        if !fp::is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldSpec { p, kind })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("precision loss: value only known to be at least {bound}")]
    PrecisionLoss { bound: ExtValue },
    #[error("zero divisor: no certified term below the precision bound")]
    ZeroDivisor,
    #[error("exponent {exponent} not representable: {reason}")]
    Exponent { exponent: Rat, reason: String },
    #[error("no exact inverse in a truncated representation")]
    InexactInverse,
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
}

/// An element of the coefficient field `K`.
///
/// Elements carry their characteristic so that zero polynomials and parsed
/// literals know which field they live in. Binary operations require equal
/// characteristics.
pub trait Coefficient:
    Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const KIND: FieldKind;

    fn p(&self) -> u64;

    fn zero(p: u64) -> Self;

    fn one(p: u64) -> Self;

    fn from_scalar(p: u64, c: i64) -> Self;

    /// The monomial `t^exponent`, when the exponent is representable in
    /// this field.
    fn t_power(p: u64, exponent: &Rat) -> Result<Self, FieldError>;

    fn add(&self, rhs: &Self) -> Self;

    fn neg(&self) -> Self;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self;

    /// Multiplicative inverse, certified so that `val(self * inv - 1)`
    /// is at least `target`. Exact representations ignore `target`.
    fn invert(&self, target: &ExtValue) -> Result<Self, FieldError>;

    /// The valuation of the element, when certified.
    fn val(&self) -> Result<ExtValue, FieldError>;

    /// A certified lower bound on the valuation; total.
    fn val_lower_bound(&self) -> ExtValue;

    /// Precision order: the element is known modulo terms of exponent
    /// at least this value. `PosInf` means exact.
    fn precision(&self) -> ExtValue;

    /// Forget knowledge at exponents `>= precision`.
    fn truncate_to(&self, precision: &ExtValue) -> Self;

    /// Certified equal to zero.
    fn is_zero(&self) -> bool;

    fn is_one(&self) -> bool {
        !self.is_zero() && *self == Self::one(self.p())
    }

    /// Decompose into summands that can be tested one by one; a monomial
    /// decomposition for series, the element itself when atomic.
    fn summands(&self) -> Vec<Self>;

    /// Canonical string that distinguishes elements including their
    /// precision marker; used as a memoization key.
    fn canonical_key(&self) -> String;
}
