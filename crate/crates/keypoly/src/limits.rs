//! Families of key polynomials of a fixed degree whose values approach
//! a supremum, membership in the set of polynomials strictly above all
//! their truncations, and the structure analysis of candidate limit key
//! polynomials.
//!
//! The one concrete family construction is the Artin-Schreier scenario:
//! over `K = union_m F_p((t^(1/p^m)))` the partial sums
//! `theta_n = sum_{i<=n} t^(-1/p^i)` give linear keys `Q_n = x - theta_n`
//! with strictly increasing values `-1/p^(n+1)` tending to 0, while the
//! full series theta is not an element of `K`; `F = x^p - x - t^(-1)`
//! is the minimal polynomial picked up in the limit.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::config;
use crate::field::puiseux::PuiseuxSeries;
use crate::field::Coefficient;
use crate::poly::Poly;
use crate::valuation::{EngineError, ThetaApprox, ThetaOracle, ValuationHandle};
use crate::value::{ExtValue, Rat};

/// A generated family of monic key polynomials of fixed degree `alpha`,
/// asserted value-cofinal among all keys of that degree. Cofinality is
/// a scenario property, not something the engine can decide; every
/// report carries the assumption.
pub struct KeyFamily<C: Coefficient> {
    pub name: String,
    pub p: u64,
    pub alpha: usize,
    /// Supremum of the member values.
    pub sup_value: ExtValue,
    /// Supremum of the member levels.
    pub sup_level: ExtValue,
    /// The eventual common maximizing derivative order.
    pub b_inf: usize,
    /// Default number of members used in reports.
    pub depth: u32,
    pub assumed_cofinal: bool,
    pub valuation: Arc<ValuationHandle<C>>,
    generator: Arc<dyn Fn(u32) -> Poly<C> + Send + Sync>,
}

impl<C: Coefficient> KeyFamily<C> {
    /// A user-supplied family: the caller asserts that the generator
    /// produces monic keys of degree `alpha` with strictly increasing
    /// values approaching `sup_value`, cofinal among keys of that degree.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        p: u64,
        alpha: usize,
        sup_value: ExtValue,
        sup_level: ExtValue,
        b_inf: usize,
        depth: u32,
        valuation: Arc<ValuationHandle<C>>,
        generator: Arc<dyn Fn(u32) -> Poly<C> + Send + Sync>,
    ) -> Self {
        KeyFamily {
            name: name.into(),
            p,
            alpha,
            sup_value,
            sup_level,
            b_inf,
            depth,
            assumed_cofinal: true,
            valuation,
            generator,
        }
    }

    pub fn member(&self, n: u32) -> Poly<C> {
        (self.generator)(n)
    }

    pub fn truncation(&self, n: u32) -> Result<Arc<ValuationHandle<C>>, EngineError> {
        ValuationHandle::truncation(self.valuation.clone(), self.member(n))
    }
}

struct ArtinSchreierTheta {
    p: u64,
}

impl ArtinSchreierTheta {
    fn partial(&self, n: u32) -> PuiseuxSeries {
        let mut acc = PuiseuxSeries::zero(self.p);
        for i in 1..=n {
            let exp = Rat::from_big(BigInt::from(-1), BigInt::from(self.p).pow(i));
            acc = acc.add(&PuiseuxSeries::monomial(self.p, exp, 1));
        }
        acc
    }
}

impl ThetaOracle<PuiseuxSeries> for ArtinSchreierTheta {
    fn p(&self) -> u64 {
        self.p
    }

    fn approximant(&self, n: u32) -> ThetaApprox<PuiseuxSeries> {
        let tail = Rat::from_big(BigInt::from(-1), BigInt::from(self.p).pow(n + 1));
        ThetaApprox {
            value: self.partial(n),
            tail_val: ExtValue::Finite(tail),
        }
    }

    fn describe(&self) -> String {
        format!("artin-schreier theta, p={}", self.p)
    }
}

/// The minimal polynomial of the Artin-Schreier scenario:
/// `x^p - x - t^(-1)`.
pub fn artin_schreier_minimal(p: u64) -> Poly<PuiseuxSeries> {
    let mut coeffs = vec![PuiseuxSeries::zero(p); p as usize + 1];
    coeffs[0] = PuiseuxSeries::monomial(p, Rat::from_int(-1), 1).neg();
    coeffs[1] = PuiseuxSeries::from_scalar(p, -1);
    coeffs[p as usize] = PuiseuxSeries::one(p);
    Poly::from_coeffs(p, coeffs)
}

/// The minimal polynomial shifted by a positive-value constant:
/// `F + t + t^2`. Its value is 1 while every truncation stays below 0.
pub fn artin_schreier_companion(p: u64) -> Poly<PuiseuxSeries> {
    let shift = PuiseuxSeries::monomial(p, Rat::from_int(1), 1).add(&PuiseuxSeries::monomial(
        p,
        Rat::from_int(2),
        1,
    ));
    artin_schreier_minimal(p).add(&Poly::constant(shift))
}

/// Build the Artin-Schreier family over `F_p` with `depth` members and
/// an explicit certification depth for the evaluation handle.
///
/// ```
/// use keypoly::limits::artin_schreier_family_with_depth;
/// use keypoly::ExtValue;
///
/// let (family, minimal) = artin_schreier_family_with_depth(2, 3, 12).unwrap();
/// assert_eq!(minimal.to_string(), "x^2 + x + t^(-1)");
/// assert_eq!(
///     family.valuation.nu(&family.member(2)).unwrap(),
///     ExtValue::from_ratio(-1, 8),
/// );
/// assert_eq!(family.valuation.nu(&minimal).unwrap(), ExtValue::PosInf);
/// ```
pub fn artin_schreier_family_with_depth(
    p: u64,
    depth: u32,
    approx_depth: u32,
) -> Result<(KeyFamily<PuiseuxSeries>, Poly<PuiseuxSeries>), EngineError> {
    crate::field::FieldSpec::new(p, crate::field::FieldKind::PuiseuxFp)?;
    if depth < 2 {
        return Err(EngineError::InvalidInput(
            "family depth must be at least 2".into(),
        ));
    }
    let minimal = artin_schreier_minimal(p);
    let oracle = Arc::new(ArtinSchreierTheta { p });
    let valuation =
        ValuationHandle::evaluation(oracle.clone(), Some(minimal.clone()), approx_depth);
    let generator = {
        let oracle = oracle.clone();
        move |n: u32| {
            let theta_n = oracle.partial(n);
            Poly::from_coeffs(p, vec![theta_n.neg(), PuiseuxSeries::one(p)])
        }
    };
    let family = KeyFamily {
        name: "artin-schreier".into(),
        p,
        alpha: 1,
        sup_value: ExtValue::zero(),
        sup_level: ExtValue::zero(),
        b_inf: 1,
        depth,
        assumed_cofinal: true,
        valuation,
        generator: Arc::new(generator),
    };
    Ok((family, minimal))
}

/// As [`artin_schreier_family_with_depth`] with the configured default
/// certification depth (at least `depth + 4`).
pub fn artin_schreier_family(
    p: u64,
    depth: u32,
) -> Result<(KeyFamily<PuiseuxSeries>, Poly<PuiseuxSeries>), EngineError> {
    let approx = config::precision_depth().max(depth + 4);
    artin_schreier_family_with_depth(p, depth, approx)
}

/// Membership status in the set of polynomials whose value strictly
/// exceeds every truncation by a family member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum SAlphaStatus {
    /// Certified for every member: infinite value, or stabilized digit
    /// values with a limit bound strictly below the value.
    InCertified,
    /// Strict inequality observed at every sampled member, without a
    /// stabilization certificate.
    InSampled,
    /// Some member's truncation reaches the value.
    Out { witness_n: u32 },
    /// The value itself could not be certified at the configured depth.
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct SAlphaMember {
    pub n: u32,
    pub nu_trunc: ExtValue,
    /// Values of the bare digits (without the base power factor).
    pub digit_values: Vec<ExtValue>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SAlphaReport {
    pub expr: String,
    pub status: SAlphaStatus,
    pub reason: String,
    pub nu_f: Option<ExtValue>,
    pub per_n: Vec<SAlphaMember>,
    /// First sampled index from which the positive-index digit values
    /// are constant.
    pub stable_from: Option<u32>,
    /// Certified upper bound for every truncation value, when stabilized.
    pub sup_bound: Option<ExtValue>,
    pub assumed_cofinal: bool,
}

/// Decide membership by sampling members `1..=n_max`.
///
/// `Out` is sound: one member whose truncation reaches the value is a
/// witness. `InCertified` uses either an infinite value or the
/// stabilization of positive-index digit values (which then persist for
/// deeper members) with limit bound `min_i (v_i + i*B)` strictly below
/// the value.
pub fn in_s_alpha<C: Coefficient>(
    family: &KeyFamily<C>,
    f: &Poly<C>,
    n_max: u32,
) -> Result<SAlphaReport, EngineError> {
    if f.is_zero() {
        return Err(EngineError::InvalidInput("membership of zero".into()));
    }
    if n_max < 2 {
        return Err(EngineError::InvalidInput("n_max must be at least 2".into()));
    }
    let v = &family.valuation;
    let nu_f = match v.nu(f) {
        Ok(val) => Some(val),
        Err(EngineError::Undecided { .. }) => None,
        Err(e) => return Err(e),
    };

    let mut per_n = vec![];
    let mut witness = None;
    for n in 1..=n_max {
        let q = family.member(n);
        let exp = v.expansion_data(f, &q)?;
        let digit_values = digit_values(v, f, &q)?;
        if let Some(nu_f) = &nu_f {
            if exp.nu_q > *nu_f {
                return Err(EngineError::Assertion {
                    check: "truncation upper bound".into(),
                    detail: format!(
                        "nu_Q(f) = {} exceeds nu(f) = {nu_f} at member {n}",
                        exp.nu_q
                    ),
                });
            }
            if exp.nu_q == *nu_f && witness.is_none() {
                witness = Some(n);
            }
        }
        per_n.push(SAlphaMember {
            n,
            nu_trunc: exp.nu_q,
            digit_values,
        });
    }

    let (stable_from, sup_bound) = stabilization(family, &per_n);

    let (status, reason) = if let Some(n) = witness {
        (
            SAlphaStatus::Out { witness_n: n },
            format!("truncation at member {n} reaches the value"),
        )
    } else {
        match &nu_f {
            None => (
                SAlphaStatus::Undetermined,
                "value not certified at the configured depth".into(),
            ),
            Some(ExtValue::PosInf) => (
                SAlphaStatus::InCertified,
                "value is infinite while every truncation is finite".into(),
            ),
            Some(val) => match (&stable_from, &sup_bound) {
                (Some(n0), Some(bound)) if bound < val => (
                    SAlphaStatus::InCertified,
                    format!(
                        "digit values stable from member {n0}; every truncation is bounded by {bound} < {val}"
                    ),
                ),
                _ => (
                    SAlphaStatus::InSampled,
                    "strict inequality at every sampled member, no stabilization certificate"
                        .into(),
                ),
            },
        }
    };

    Ok(SAlphaReport {
        expr: f.to_string(),
        status,
        reason,
        nu_f,
        per_n,
        stable_from,
        sup_bound,
        assumed_cofinal: family.assumed_cofinal,
    })
}

fn digit_values<C: Coefficient>(
    v: &ValuationHandle<C>,
    f: &Poly<C>,
    q: &Poly<C>,
) -> Result<Vec<ExtValue>, EngineError> {
    let exp = f.q_expand(q)?;
    let mut out = vec![];
    for digit in &exp.digits {
        if digit.is_zero() {
            out.push(ExtValue::PosInf);
        } else {
            out.push(v.nu(digit)?);
        }
    }
    Ok(out)
}

/// Find the earliest window from which all digit values at positive
/// indices are constant (window length at least 3), and the limit bound
/// `min_{i >= 1} (v_i + i * B)` over the stabilized values.
fn stabilization<C: Coefficient>(
    family: &KeyFamily<C>,
    per_n: &[SAlphaMember],
) -> (Option<u32>, Option<ExtValue>) {
    if per_n.len() < 3 {
        return (None, None);
    }
    let last = &per_n[per_n.len() - 1];
    let width = last.digit_values.len();
    let stable_with = |m: &SAlphaMember| -> bool {
        m.digit_values.len() == width
            && (1..width).all(|i| m.digit_values[i] == last.digit_values[i])
    };
    let mut start = per_n.len() - 1;
    while start > 0 && stable_with(&per_n[start - 1]) {
        start -= 1;
    }
    if per_n.len() - start < 3 {
        return (None, None);
    }
    let mut bound: Option<ExtValue> = None;
    for (i, v) in last.digit_values.iter().enumerate().skip(1) {
        if *v == ExtValue::PosInf {
            continue;
        }
        let candidate = match v.checked_add(&family.sup_value.mul_nat(i)) {
            Ok(c) => c,
            Err(_) => return (Some(per_n[start].n), None),
        };
        bound = Some(match bound {
            None => candidate,
            Some(b) => b.min(candidate),
        });
    }
    (Some(per_n[start].n), bound)
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncValue {
    pub n: u32,
    pub nu_q: ExtValue,
    pub nu_trunc: ExtValue,
    pub expected: ExtValue,
    pub matches: bool,
}

/// Structure analysis of a candidate limit key polynomial against one
/// family member.
#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub expr: String,
    pub n: u32,
    pub q: String,
    pub membership: SAlphaStatus,
    pub delta: usize,
    pub r: u32,
    pub leading_one: bool,
    pub nu_f: Option<ExtValue>,
    pub delta_b: ExtValue,
    pub nu_trunc_values: Vec<TruncValue>,
    pub gamma: usize,
    pub lambda: Vec<usize>,
    pub omega: Option<usize>,
    pub p_part: String,
    pub coefficient_values: Vec<(usize, ExtValue)>,
    pub assumed_cofinal: bool,
}

fn is_p_power(p: u64, mut i: usize) -> bool {
    if i == 0 {
        return false;
    }
    while i.is_multiple_of(p as usize) {
        i /= p as usize;
    }
    i == 1
}

/// Analyze the expansion of a monic member of the limit set against the
/// `n`-th family key: the attaining index must equal the expansion
/// degree and be a power of `p` with leading digit 1, and the truncated
/// value must be `delta * nu(Q_m)` at every member.
pub fn limit_structure<C: Coefficient>(
    family: &KeyFamily<C>,
    f: &Poly<C>,
    n: u32,
) -> Result<LimitReport, EngineError> {
    if !f.is_monic() {
        return Err(EngineError::InvalidInput(
            "limit key candidates must be monic".into(),
        ));
    }
    let p = family.p;
    let v = &family.valuation;
    let n_max = family.depth.max(n) + 2;
    let membership = in_s_alpha(family, f, n_max)?;
    if let SAlphaStatus::Out { witness_n } = membership.status {
        return Err(EngineError::InvalidInput(format!(
            "candidate is not in the limit set: member {witness_n} reaches its value"
        )));
    }

    let q = family.member(n);
    let exp = v.expansion_data(f, &q)?;
    let delta = exp.delta;
    if delta != exp.deg_q {
        return Err(EngineError::Structure {
            clause: "delta-equals-degree".into(),
            detail: format!("delta = {delta} but deg_Q = {}", exp.deg_q),
        });
    }
    let digits = f.q_expand(&q)?;
    let leading_one = digits.digit(delta).coeffs().first().map(|c| c.is_one()) == Some(true)
        && digits.digit(delta).deg() == Some(0);
    if !leading_one {
        return Err(EngineError::Structure {
            clause: "leading-digit-one".into(),
            detail: format!("leading digit is {}", digits.digit(delta)),
        });
    }
    let mut unit = delta;
    let mut r = 0u32;
    while unit % p as usize == 0 {
        unit /= p as usize;
        r += 1;
    }
    if unit != 1 {
        return Err(EngineError::Structure {
            clause: "degree-p-power".into(),
            detail: format!("delta = {delta} is not a power of {p}"),
        });
    }

    let delta_b = family.sup_value.mul_nat(delta);

    // highest non-p-power index whose term value stays below delta * B
    let mut gamma = 0usize;
    for i in (1..=delta).rev() {
        if is_p_power(p, i) {
            continue;
        }
        if exp.values[i] < delta_b {
            gamma = i;
            break;
        }
    }
    let lambda: Vec<usize> = ((gamma + 1)..=delta)
        .filter(|i| is_p_power(p, *i) && exp.values[*i] < delta_b)
        .collect();
    let omega = if gamma > 0 {
        let mut partial = Poly::zero(f.p());
        for i in 1..=gamma {
            partial = partial.add(&digits.digit(i).mul(&q.pow(i)));
        }
        Some(v.expansion_data(&partial, &q)?.delta)
    } else {
        None
    };

    let mut p_part = digits.digit(0);
    for i in &lambda {
        p_part = p_part.add(&digits.digit(*i).mul(&q.pow(*i)));
    }

    let mut nu_trunc_values = vec![];
    for m in 1..=family.depth.max(n) {
        let qm = family.member(m);
        let em = v.expansion_data(f, &qm)?;
        let nu_qm = v.nu(&qm)?;
        let expected = nu_qm.mul_nat(delta);
        let matches = em.nu_q == expected;
        if !matches {
            return Err(EngineError::Structure {
                clause: "truncation-value".into(),
                detail: format!(
                    "member {m}: nu_Q(f) = {} but delta * nu(Q) = {expected}",
                    em.nu_q
                ),
            });
        }
        nu_trunc_values.push(TruncValue {
            n: m,
            nu_q: nu_qm,
            nu_trunc: em.nu_q,
            expected,
            matches,
        });
    }

    let coefficient_values: Vec<(usize, ExtValue)> = digits
        .digits
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero())
        .map(|(i, d)| Ok((i, v.nu(d)?)))
        .collect::<Result<_, EngineError>>()?;

    Ok(LimitReport {
        expr: f.to_string(),
        n,
        q: q.to_string(),
        membership: membership.status,
        delta,
        r,
        leading_one,
        nu_f: membership.nu_f,
        delta_b,
        nu_trunc_values,
        gamma,
        lambda,
        omega,
        p_part: p_part.to_string(),
        coefficient_values,
        assumed_cofinal: family.assumed_cofinal,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RemovalReport {
    pub expr: String,
    pub n: u32,
    pub bound: ExtValue,
    pub removed: Vec<String>,
    pub result: String,
    pub result_status: SAlphaStatus,
}

/// Remove the parts of an expansion whose values exceed the certified
/// bound on every truncation value from member `n` on.
///
/// Positive-index digits are split into their monomial summands and each
/// summand `c * Q^i` is removed when its value exceeds the bound both at
/// member `n` (member values only grow) and in the limit; the constant
/// digit is kept whole. Membership is re-checked on the result.
pub fn remove_high_monomials<C: Coefficient>(
    family: &KeyFamily<C>,
    f: &Poly<C>,
    n: u32,
    n_max: u32,
) -> Result<(Poly<C>, RemovalReport), EngineError> {
    let v = &family.valuation;
    let before = in_s_alpha(family, f, n_max)?;
    if matches!(before.status, SAlphaStatus::Out { .. }) {
        return Err(EngineError::InvalidInput(
            "input is not in the limit set".into(),
        ));
    }
    let bound = match &before.sup_bound {
        Some(b) => b.clone(),
        None => return Err(EngineError::Undecided { depth: n_max }),
    };

    let q = family.member(n);
    let nu_q = v.nu(&q)?;
    let digits = f.q_expand(&q)?;
    // the constant digit is kept whole; positive-index constant digits are
    // split into monomial summands
    let mut result = digits.digit(0);
    let mut removed = vec![];
    for (i, digit) in digits.digits.iter().enumerate().skip(1) {
        if digit.is_zero() {
            continue;
        }
        if digit.deg() != Some(0) {
            let dval = v.nu(digit)?;
            let at_n = dval.checked_add(&nu_q.mul_nat(i))?;
            let at_limit = dval.checked_add(&family.sup_value.mul_nat(i))?;
            if at_n > bound && at_limit > bound {
                removed.push(format!("({digit})*({q})^{i}"));
            } else {
                result = result.add(&digit.mul(&q.pow(i)));
            }
            continue;
        }
        let mut kept = Poly::zero(f.p());
        for unit in digit.coeff(0).summands() {
            let uval = unit.val()?;
            let at_n = uval.checked_add(&nu_q.mul_nat(i))?;
            let at_limit = uval.checked_add(&family.sup_value.mul_nat(i))?;
            if at_n > bound && at_limit > bound {
                removed.push(format!("({unit})*({q})^{i}"));
            } else {
                kept = kept.add(&Poly::constant(unit));
            }
        }
        result = result.add(&kept.mul(&q.pow(i)));
    }

    let after = in_s_alpha(family, &result, n_max)?;
    if matches!(after.status, SAlphaStatus::Out { .. }) {
        return Err(EngineError::Assertion {
            check: "removal preserves membership".into(),
            detail: format!("result {result} left the limit set"),
        });
    }
    let report = RemovalReport {
        expr: f.to_string(),
        n,
        bound,
        removed,
        result: result.to_string(),
        result_status: after.status,
    };
    Ok((result, report))
}

/// The default witness set for refuting a key-polynomial candidate:
/// every monic monomial of smaller degree, every family member of
/// smaller degree, and `random_count` sampled polynomials.
pub fn default_witnesses<C: crate::rng::SampleCoefficient>(
    family: &KeyFamily<C>,
    q: &Poly<C>,
    rng: &mut crate::rng::Rng,
    random_count: u32,
) -> Vec<Poly<C>> {
    let qdeg = q.deg().unwrap_or(0);
    let mut out = vec![];
    for i in 0..qdeg {
        out.push(Poly::monomial(C::one(family.p), i));
    }
    if family.alpha < qdeg {
        for n in 1..=family.depth {
            out.push(family.member(n));
        }
    }
    let profile = crate::rng::SampleProfile::default();
    for _ in 0..random_count {
        let f: Poly<C> =
            crate::rng::sample_poly(rng, family.p, 0, qdeg.saturating_sub(1), &profile);
        if !f.is_zero() {
            out.push(f);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivBound {
    pub b: usize,
    pub value: ExtValue,
    pub bound: ExtValue,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundMember {
    pub n: u32,
    pub nu_q: ExtValue,
    pub eps_q: ExtValue,
    #[serde(rename = "I")]
    pub argmax: Vec<usize>,
    pub derivative_bounds: Vec<DerivBound>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TupleSample {
    pub q_index: u32,
    pub scale: usize,
    pub order_m: usize,
    pub power: usize,
    pub tuple: String,
    pub value: ExtValue,
    pub bound: ExtValue,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundChecksReport {
    pub p: u64,
    pub from: u32,
    pub to: u32,
    pub members: Vec<BoundMember>,
    pub samples: Vec<TupleSample>,
    pub pass: bool,
}

/// Per-member checks near the supremum: derivative values stay above
/// `B - b * sup_level`, the maximizing set is the eventual singleton,
/// and sampled expansion terms of `a Q^power` satisfy the combined
/// lower bound `(l + r - m)B + (m + power - r)nu(Q) - b*eps(Q)`.
pub fn bound_checks<C: Coefficient>(
    family: &KeyFamily<C>,
    from: u32,
    to: u32,
) -> Result<BoundChecksReport, EngineError> {
    if from == 0 || to < from {
        return Err(EngineError::InvalidInput("bad member range".into()));
    }
    let v = &family.valuation;
    let mut members = vec![];
    for n in from..=to {
        let q = family.member(n);
        let lev = v.level(&q)?;
        let expected: std::collections::BTreeSet<usize> = [family.b_inf].into();
        if lev.argmax != expected {
            return Err(EngineError::Assertion {
                check: "eventual maximizing singleton".into(),
                detail: format!(
                    "member {n}: I = {:?}, expected {{{}}}",
                    lev.argmax, family.b_inf
                ),
            });
        }
        let mut derivative_bounds = vec![];
        for b in 1..=family.alpha.max(3) {
            let dq = q.hasse_derivative(b);
            let value = if dq.is_zero() {
                ExtValue::PosInf
            } else {
                v.nu(&dq)?
            };
            let bound = family.sup_value.checked_sub(&family.sup_level.mul_nat(b))?;
            if value < bound {
                return Err(EngineError::Assertion {
                    check: "derivative value bound".into(),
                    detail: format!("member {n}, order {b}: nu(d_b Q) = {value} below {bound}"),
                });
            }
            derivative_bounds.push(DerivBound { b, value, bound });
        }
        members.push(BoundMember {
            n,
            nu_q: v.nu(&q)?,
            eps_q: lev.epsilon,
            argmax: lev.argmax.iter().copied().collect(),
            derivative_bounds,
        });
    }

    // sampled combined bounds on expansion terms of a * Q^power
    let mut samples = vec![];
    let q_index = from.midpoint(to);
    let q = family.member(q_index);
    let eps_q = v.level(&q)?.epsilon;
    let nu_q = v.nu(&q)?;
    for scale in 0..=1usize {
        let a = Poly::constant(
            C::t_power(family.p, &Rat::from_int(scale as i64)).map_err(EngineError::from)?,
        );
        for power in 2..=3usize {
            for m in 1..power {
                let b = m * family.b_inf;
                let tuples =
                    crate::deriv::leibniz_expand(&a, &q, power, b, config::DEFAULT_TUPLE_CAP)?;
                for tuple in &tuples {
                    let rr = tuple.parts.len();
                    let value = v.nu(&tuple.term)?;
                    let bound = family
                        .sup_value
                        .mul_int(scale as i64 + rr as i64 - m as i64)
                        .checked_add(&nu_q.mul_nat(m + power - rr))?
                        .checked_sub(&eps_q.mul_nat(b))?;
                    if value < bound {
                        return Err(EngineError::Assertion {
                            check: "combined tuple bound".into(),
                            detail: format!(
                                "member {q_index}, a=t^{scale}, power={power}, m={m}, tuple {}: {value} < {bound}",
                                tuple.describe()
                            ),
                        });
                    }
                    samples.push(TupleSample {
                        q_index,
                        scale,
                        order_m: m,
                        power,
                        tuple: tuple.describe(),
                        value,
                        bound,
                    });
                }
            }
        }
    }

    Ok(BoundChecksReport {
        p: family.p,
        from,
        to,
        members,
        samples,
        pass: true,
    })
}
