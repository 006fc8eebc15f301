//! Valuation handles on `K[x]`: monomial valuations, evaluation at a
//! described series with certified approximants, and truncations with
//! respect to a key polynomial. Levels, per-digit expansion data, and
//! key-polynomial refutation live here too.
//!
//! Every returned value is exact and certified; when a certificate
//! cannot be produced within the configured approximation depth the
//! answer is `Undecided`, never a guess.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::field::{Coefficient, FieldError};
use crate::parse::ParseError;
use crate::poly::{Poly, PolyError};
use crate::value::{ExtValue, Rat, ValueError};

#[derive(Debug, Clone, Error)]
pub enum EngineError {
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("undecided after approximation depth {depth}")]
    Undecided { depth: u32 },
    #[error("{check} failed: {detail}")]
    Assertion { check: String, detail: String },
    #[error("structure violation [{clause}]: {detail}")]
    Structure { clause: String, detail: String },
    #[error("tuple enumeration would produce {size} tuples, above the cap {cap}")]
    TupleCap { size: u64, cap: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Process exit classification for CLI reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    /// A checked identity or bound failed.
    Assertion,
    /// A certificate could not be produced at the configured depth.
    Undecided,
    /// Malformed or unsupported input.
    Input,
}

impl ExitClass {
    pub fn code(self) -> i32 {
        match self {
            ExitClass::Assertion => 1,
            ExitClass::Undecided => 2,
            ExitClass::Input => 3,
        }
    }
}

impl EngineError {
    pub fn exit_class(&self) -> ExitClass {
        match self {
            EngineError::Assertion { .. } | EngineError::Structure { .. } => ExitClass::Assertion,
            EngineError::Value(_) => ExitClass::Assertion,
            EngineError::Undecided { .. } => ExitClass::Undecided,
            EngineError::Field(e) => match e {
                FieldError::PrecisionLoss { .. }
                | FieldError::InexactInverse
                | FieldError::ZeroDivisor => ExitClass::Undecided,
                _ => ExitClass::Input,
            },
            EngineError::Poly(e) => match e {
                PolyError::Field(FieldError::PrecisionLoss { .. })
                | PolyError::Field(FieldError::InexactInverse) => ExitClass::Undecided,
                PolyError::Inexact(_) => ExitClass::Assertion,
                _ => ExitClass::Input,
            },
            EngineError::Parse(_) => ExitClass::Input,
            EngineError::TupleCap { .. } => ExitClass::Input,
            EngineError::InvalidInput(_) => ExitClass::Input,
        }
    }
}

/// An approximant of the described series together with the exact
/// valuation of the remaining tail.
pub struct ThetaApprox<C> {
    pub value: C,
    /// `val(theta - value)`, exactly.
    pub tail_val: ExtValue,
}

/// A described series with approximants of increasing precision.
pub trait ThetaOracle<C>: Send + Sync {
    fn p(&self) -> u64;
    fn approximant(&self, n: u32) -> ThetaApprox<C>;
    fn describe(&self) -> String;
}

enum HandleKind<C: Coefficient> {
    Monomial {
        gamma: Rat,
    },
    Evaluation {
        oracle: Arc<dyn ThetaOracle<C>>,
        minimal_poly: Option<Poly<C>>,
        depth: u32,
    },
    Truncation {
        inner: Arc<ValuationHandle<C>>,
        key: Poly<C>,
    },
}

/// A rank-one valuation on `K[x]`.
///
/// Handles are immutable descriptions; values are memoized per handle
/// behind a lock, and the cache is transparent: answers are identical
/// with or without it.
///
/// ```
/// use keypoly::{parse_poly, ExtValue, Poly, Rat, RatFunc, ValuationHandle};
///
/// let v = ValuationHandle::<RatFunc>::monomial(2, Rat::new(1, 2));
/// let f: Poly<RatFunc> = parse_poly(2, "x^2 + t").unwrap();
/// assert_eq!(v.nu(&f).unwrap(), ExtValue::from_int(1));
///
/// let trunc = ValuationHandle::truncation(v, Poly::x(2)).unwrap();
/// let data = trunc.expansion_data(&f, &Poly::x(2)).unwrap();
/// assert_eq!(data.delta, 2);
/// ```
pub struct ValuationHandle<C: Coefficient> {
    p: u64,
    kind: HandleKind<C>,
    cache: Mutex<HashMap<String, ExtValue>>,
}

/// Level data of a polynomial: the maximum of `(nu(f) - nu(d_b f)) / b`
/// over derivative orders `b >= 1`, the set of maximizing orders, and
/// its largest element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelData {
    pub epsilon: ExtValue,
    #[serde(rename = "I")]
    pub argmax: BTreeSet<usize>,
    pub b_max: Option<usize>,
}

/// Per-digit values of an expansion `f = sum f_i Q^i` under a valuation:
/// the minimum, the set of attaining indices, and its maximum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpansionData {
    pub values: Vec<ExtValue>,
    pub nu_q: ExtValue,
    #[serde(rename = "S")]
    pub min_set: BTreeSet<usize>,
    pub delta: usize,
    pub deg_q: usize,
}

/// Outcome of a key-polynomial refutation attempt. Refutation is sound;
/// `NotRefuted` only reports that no supplied witness works.
#[derive(Debug, Clone)]
pub enum KeyRefutation<C: Coefficient> {
    Refuted {
        witness: Poly<C>,
        witness_level: ExtValue,
        level: ExtValue,
    },
    NotRefuted {
        level: ExtValue,
        witnesses_checked: usize,
    },
}

impl<C: Coefficient> ValuationHandle<C> {
    pub fn monomial(p: u64, gamma: Rat) -> Arc<Self> {
        Arc::new(ValuationHandle {
            p,
            kind: HandleKind::Monomial { gamma },
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn evaluation(
        oracle: Arc<dyn ThetaOracle<C>>,
        minimal_poly: Option<Poly<C>>,
        depth: u32,
    ) -> Arc<Self> {
        Arc::new(ValuationHandle {
            p: oracle.p(),
            kind: HandleKind::Evaluation {
                oracle,
                minimal_poly,
                depth,
            },
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// The truncation of `inner` with respect to a monic key polynomial.
    pub fn truncation(
        inner: Arc<ValuationHandle<C>>,
        key: Poly<C>,
    ) -> Result<Arc<Self>, EngineError> {
        if !key.is_monic() || key.deg().unwrap_or(0) == 0 {
            return Err(EngineError::InvalidInput(
                "truncation key must be monic of positive degree".into(),
            ));
        }
        Ok(Arc::new(ValuationHandle {
            p: inner.p,
            kind: HandleKind::Truncation { inner, key },
            cache: Mutex::new(HashMap::new()),
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            HandleKind::Monomial { gamma } => format!("monomial({gamma})"),
            HandleKind::Evaluation {
                oracle,
                minimal_poly,
                depth,
            } => match minimal_poly {
                Some(m) => format!(
                    "evaluation({}, depth={depth}, minimal={m})",
                    oracle.describe()
                ),
                None => format!("evaluation({}, depth={depth})", oracle.describe()),
            },
            HandleKind::Truncation { inner, key } => {
                format!("truncation({}, Q={key})", inner.describe())
            }
        }
    }

    /// The truncation key, when this handle is a truncation.
    pub fn truncation_key(&self) -> Option<&Poly<C>> {
        match &self.kind {
            HandleKind::Truncation { key, .. } => Some(key),
            _ => None,
        }
    }

    /// The value of `f`, exact and certified.
    pub fn nu(&self, f: &Poly<C>) -> Result<ExtValue, EngineError> {
        if f.is_zero() {
            return Ok(ExtValue::PosInf);
        }
        let key = f.canonical_key();
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let out = self.compute_nu(f)?;
        self.cache.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }

    fn compute_nu(&self, f: &Poly<C>) -> Result<ExtValue, EngineError> {
        match &self.kind {
            HandleKind::Monomial { gamma } => {
                let gamma = ExtValue::Finite(gamma.clone());
                let mut best: Option<ExtValue> = None;
                for (i, c) in f.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let v = c.val()?.checked_add(&gamma.mul_nat(i))?;
                    best = Some(match best {
                        None => v,
                        Some(b) => b.min(v),
                    });
                }
                Ok(best.unwrap_or(ExtValue::PosInf))
            }
            HandleKind::Evaluation {
                oracle,
                minimal_poly,
                depth,
            } => self.nu_by_evaluation(oracle.as_ref(), minimal_poly.as_ref(), *depth, f),
            HandleKind::Truncation { inner, key } => {
                let qval = inner.nu(key)?;
                let expansion = f.q_expand(key)?;
                let mut best: Option<ExtValue> = None;
                for (i, digit) in expansion.digits.iter().enumerate() {
                    if digit.is_zero() {
                        continue;
                    }
                    let v = inner.nu(digit)?.checked_add(&qval.mul_nat(i))?;
                    best = Some(match best {
                        None => v,
                        Some(b) => b.min(v),
                    });
                }
                Ok(best.unwrap_or(ExtValue::PosInf))
            }
        }
    }

    /// Certified value under an evaluation handle. The input is first
    /// reduced modulo the declared minimal polynomial (whose multiples
    /// are exactly the polynomials of infinite value); the remainder is
    /// then certified at increasing approximation depth: the expansion
    /// at the approximant must have a unique minimal digit value, and
    /// direct evaluation with precision tracking must confirm it.
    fn nu_by_evaluation(
        &self,
        oracle: &dyn ThetaOracle<C>,
        minimal_poly: Option<&Poly<C>>,
        depth: u32,
        f: &Poly<C>,
    ) -> Result<ExtValue, EngineError> {
        let reduced = match minimal_poly {
            Some(min) => {
                let (_, r) = f.euclid_divide(min)?;
                if r.is_zero() {
                    return Ok(ExtValue::PosInf);
                }
                r
            }
            None => f.clone(),
        };
        for n in 1..=depth {
            let ap = oracle.approximant(n);
            let digits = reduced.taylor_digits(&ap.value);
            let mut vals: Vec<(usize, ExtValue)> = vec![];
            for (i, d) in digits.iter().enumerate() {
                if d.is_zero() {
                    continue;
                }
                let v = d.val()?.checked_add(&ap.tail_val.mul_nat(i))?;
                vals.push((i, v));
            }
            let min = vals
                .iter()
                .map(|(_, v)| v.clone())
                .min()
                .expect("nonzero polynomial has a nonzero digit");
            let attained = vals.iter().filter(|(_, v)| *v == min).count();
            if attained == 1 {
                // precision-tracked evaluation around the approximant: sum
                // the digits against the unknown tail of order tail_val
                let tail_hat = C::zero(reduced.p()).truncate_to(&ap.tail_val);
                let mut direct = C::zero(reduced.p());
                for d in digits.iter().rev() {
                    direct = direct.mul(&tail_hat).add(d);
                }
                if let Ok(v) = direct.val() {
                    if v != min {
                        return Err(EngineError::Assertion {
                            check: "evaluation certificate".into(),
                            detail: format!(
                                "direct evaluation gave {v}, digit expansion gave {min} for {reduced}"
                            ),
                        });
                    }
                    return Ok(min);
                }
            }
        }
        Err(EngineError::Undecided { depth })
    }

    /// Level data of a nonzero polynomial. Constants have level `-inf`
    /// over the empty set of derivative orders.
    pub fn level(&self, f: &Poly<C>) -> Result<LevelData, EngineError> {
        let deg = f
            .deg()
            .ok_or_else(|| EngineError::InvalidInput("level of the zero polynomial".into()))?;
        if deg == 0 {
            return Ok(LevelData {
                epsilon: ExtValue::NegInf,
                argmax: BTreeSet::new(),
                b_max: None,
            });
        }
        let nu_f = self.nu(f)?;
        let mut best: Option<ExtValue> = None;
        let mut candidates = vec![];
        for b in 1..=deg {
            let df = f.hasse_derivative(b);
            if df.is_zero() {
                continue;
            }
            let nu_df = self.nu(&df)?;
            let cand = level_candidate(&nu_f, &nu_df, b)?;
            best = Some(match best {
                None => cand.clone(),
                Some(prev) => prev.max(cand.clone()),
            });
            candidates.push((b, cand));
        }
        let epsilon = best.expect("positive degree yields at least one candidate");
        let argmax: BTreeSet<usize> = candidates
            .into_iter()
            .filter(|(_, c)| *c == epsilon)
            .map(|(b, _)| b)
            .collect();
        let b_max = argmax.iter().next_back().copied();
        Ok(LevelData {
            epsilon,
            argmax,
            b_max,
        })
    }

    /// Per-digit data of the expansion of `f` in the monic base `q`.
    pub fn expansion_data(&self, f: &Poly<C>, q: &Poly<C>) -> Result<ExpansionData, EngineError> {
        if f.is_zero() {
            return Err(EngineError::InvalidInput(
                "expansion data of the zero polynomial".into(),
            ));
        }
        let qval = self.nu(q)?;
        let expansion = f.q_expand(q)?;
        let mut values = vec![];
        for (i, digit) in expansion.digits.iter().enumerate() {
            if digit.is_zero() {
                values.push(ExtValue::PosInf);
            } else {
                values.push(self.nu(digit)?.checked_add(&qval.mul_nat(i))?);
            }
        }
        let nu_q = values.iter().min().cloned().expect("nonzero expansion");
        let min_set: BTreeSet<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == nu_q)
            .map(|(i, _)| i)
            .collect();
        let delta = *min_set.iter().next_back().expect("nonempty minimizing set");
        Ok(ExpansionData {
            values,
            nu_q,
            min_set,
            delta,
            deg_q: expansion.digits.len() - 1,
        })
    }

    /// Try to refute that `q` is a key polynomial: a witness of smaller
    /// degree whose level reaches `level(q)` disproves it. Sound refuter,
    /// incomplete certifier.
    pub fn refute_key(
        &self,
        q: &Poly<C>,
        witnesses: &[Poly<C>],
    ) -> Result<KeyRefutation<C>, EngineError> {
        let qdeg = q
            .deg()
            .ok_or_else(|| EngineError::InvalidInput("key candidate is zero".into()))?;
        if !q.is_monic() || qdeg == 0 {
            return Err(EngineError::InvalidInput(
                "key candidate must be monic of positive degree".into(),
            ));
        }
        let q_level = self.level(q)?;
        let mut checked = 0usize;
        for w in witnesses {
            let wdeg = match w.deg() {
                Some(d) => d,
                None => continue,
            };
            if wdeg >= qdeg {
                return Err(EngineError::InvalidInput(format!(
                    "witness degree {wdeg} is not below deg(q) = {qdeg}"
                )));
            }
            checked += 1;
            let w_level = self.level(w)?;
            if w_level.epsilon >= q_level.epsilon {
                return Ok(KeyRefutation::Refuted {
                    witness: w.clone(),
                    witness_level: w_level.epsilon,
                    level: q_level.epsilon,
                });
            }
        }
        Ok(KeyRefutation::NotRefuted {
            level: q_level.epsilon,
            witnesses_checked: checked,
        })
    }
}

/// One candidate `(nu_f - nu_df) / b` of the level maximum. Two infinite
/// values compare as an attained bound at infinite level.
fn level_candidate(nu_f: &ExtValue, nu_df: &ExtValue, b: usize) -> Result<ExtValue, EngineError> {
    if *nu_f == ExtValue::PosInf && *nu_df == ExtValue::PosInf {
        return Ok(ExtValue::PosInf);
    }
    Ok(nu_f.checked_sub(nu_df)?.div_nat(b as u64))
}

impl<C: Coefficient> fmt::Debug for ValuationHandle<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ratfunc::RatFunc;
    use crate::parse::parse_poly;

    fn rf(p: u64, s: &str) -> Poly<RatFunc> {
        parse_poly(p, s).unwrap()
    }

    #[test]
    fn monomial_closed_form() {
        let v = ValuationHandle::monomial(2, Rat::new(1, 2));
        let f = rf(2, "x^2 + t");
        assert_eq!(v.nu(&f).unwrap(), ExtValue::from_int(1));
        assert_eq!(v.nu(&rf(2, "0")).unwrap(), ExtValue::PosInf);
        assert_eq!(v.nu(&rf(2, "1")).unwrap(), ExtValue::zero());
    }

    #[test]
    fn level_of_constants_is_neg_inf() {
        let v = ValuationHandle::monomial(2, Rat::zero());
        let data = v.level(&rf(2, "t^(-1)")).unwrap();
        assert_eq!(data.epsilon, ExtValue::NegInf);
        assert!(data.argmax.is_empty());
        assert_eq!(data.b_max, None);
    }

    #[test]
    fn level_skips_vanishing_derivatives() {
        // over F_2 with gamma = 0: d_1(x^2) = 0, d_2(x^2) = 1
        let v = ValuationHandle::monomial(2, Rat::zero());
        let data = v.level(&rf(2, "x^2")).unwrap();
        assert_eq!(data.epsilon, ExtValue::zero());
        assert_eq!(data.argmax, BTreeSet::from([2]));
        assert_eq!(data.b_max, Some(2));
    }

    #[test]
    fn truncation_of_monomial_at_x() {
        let v = ValuationHandle::monomial(2, Rat::zero());
        let vx = ValuationHandle::truncation(v, Poly::x(2)).unwrap();
        let f = rf(2, "x^2 + t");
        let data = vx.expansion_data(&f, &Poly::x(2)).unwrap();
        assert_eq!(data.values[0], ExtValue::from_int(1));
        assert_eq!(data.values[1], ExtValue::PosInf);
        assert_eq!(data.values[2], ExtValue::zero());
        assert_eq!(data.nu_q, ExtValue::zero());
        assert_eq!(data.min_set, BTreeSet::from([2]));
        assert_eq!(vx.nu(&f).unwrap(), ExtValue::zero());
    }

    #[test]
    fn refute_reducible_key() {
        let v = ValuationHandle::monomial(2, Rat::zero());
        let q = rf(2, "x^2");
        let out = v.refute_key(&q, &[rf(2, "x")]).unwrap();
        match out {
            KeyRefutation::Refuted {
                witness,
                witness_level,
                level,
            } => {
                assert_eq!(witness, rf(2, "x"));
                assert_eq!(witness_level, level);
            }
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn memoization_is_transparent() {
        let v1 = ValuationHandle::monomial(3, Rat::new(1, 3));
        let v2 = ValuationHandle::monomial(3, Rat::new(1, 3));
        let f = rf(3, "x^4 + t*x + t^(2)");
        let first = v1.nu(&f).unwrap();
        let again = v1.nu(&f).unwrap();
        let fresh = v2.nu(&f).unwrap();
        assert_eq!(first, again);
        assert_eq!(first, fresh);
    }
}
