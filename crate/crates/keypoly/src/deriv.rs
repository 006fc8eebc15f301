//! The interplay between Hasse derivatives and truncations: Leibniz
//! tuple expansions of `d_b(h Q^n)` with multinomial coefficients, the
//! per-tuple value bound with its tightness criterion, and the
//! derivative drop operator.

use std::collections::HashMap;

use serde::Serialize;

use crate::field::Coefficient;
use crate::fp;
use crate::poly::Poly;
use crate::valuation::{EngineError, LevelData, ValuationHandle};
use crate::value::ExtValue;

/// One term of the Leibniz expansion of `d_b(h Q^n)`: the derivative
/// orders `(head; parts...)` with `head + sum(parts) = b`, the
/// multinomial coefficient reduced mod `p`, and the term polynomial
/// `d_head(h) * prod d_part(Q) * Q^(n - parts.len())`.
#[derive(Debug, Clone)]
pub struct DerivTuple<C: Coefficient> {
    pub head: usize,
    pub parts: Vec<usize>,
    pub coeff: u64,
    pub term: Poly<C>,
}

impl<C: Coefficient> DerivTuple<C> {
    pub fn order(&self) -> usize {
        self.head + self.parts.iter().sum::<usize>()
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.parts.iter().map(|b| b.to_string()).collect();
        format!("({}; {})", self.head, parts.join(","))
    }
}

/// `n! / ((n-r)! * prod multiplicities!) mod p`, computed as a product
/// of binomials reduced by the Lucas rule. `parts` must be sorted.
pub fn multinomial_mod_p(p: u64, n: usize, parts: &[usize]) -> u64 {
    let r = parts.len();
    if r > n {
        return 0;
    }
    debug_assert!(
        parts.windows(2).all(|w| w[0] <= w[1]),
        "parts must be sorted"
    );
    let mut acc = fp::lucas_binom(p, n as u64, r as u64);
    let mut consumed = 0u64;
    let mut idx = 0usize;
    while idx < r && acc != 0 {
        let mut mult = 1u64;
        while idx + 1 < r && parts[idx + 1] == parts[idx] {
            mult += 1;
            idx += 1;
        }
        idx += 1;
        consumed += mult;
        acc = fp::mul(p, acc, fp::lucas_binom(p, consumed, mult));
    }
    acc
}

/// Enumerate the complete Leibniz expansion of `d_b(h Q^n)`.
///
/// Every tuple `(head; b_1 <= ... <= b_r)` with `r <= n` and order `b`
/// appears exactly once; the sum of `coeff * term` over the result
/// reconstructs `d_b(h Q^n)` exactly.
pub fn leibniz_expand<C: Coefficient>(
    h: &Poly<C>,
    q: &Poly<C>,
    n: usize,
    b: usize,
    cap: u64,
) -> Result<Vec<DerivTuple<C>>, EngineError> {
    let qdeg = q
        .deg()
        .ok_or_else(|| EngineError::InvalidInput("expansion base is zero".into()))?;
    if let Some(hdeg) = h.deg() {
        if hdeg >= qdeg {
            return Err(EngineError::InvalidInput(
                "deg(h) must be smaller than deg(Q)".into(),
            ));
        }
    }
    if n == 0 || b == 0 {
        return Err(EngineError::InvalidInput(
            "power and derivative order must be positive".into(),
        ));
    }
    // tuples (head; parts): partitions of b - head into at most n positive parts
    let mut shapes: Vec<(usize, Vec<usize>)> = vec![];
    for head in 0..=b {
        let mut current = vec![];
        collect_partitions(b - head, 1, n, &mut current, &mut shapes, head, cap)?;
    }

    let mut q_powers = Vec::with_capacity(n + 1);
    q_powers.push(Poly::one(q.p()));
    for _ in 0..n {
        q_powers.push(q_powers.last().unwrap().mul(q));
    }
    let mut dh_cache: HashMap<usize, Poly<C>> = HashMap::new();
    let mut dq_cache: HashMap<usize, Poly<C>> = HashMap::new();

    let mut out = Vec::with_capacity(shapes.len());
    for (head, parts) in shapes {
        let coeff = multinomial_mod_p(q.p(), n, &parts);
        let mut term = dh_cache
            .entry(head)
            .or_insert_with(|| h.hasse_derivative(head))
            .clone();
        for part in &parts {
            let dq = dq_cache
                .entry(*part)
                .or_insert_with(|| q.hasse_derivative(*part));
            term = term.mul(dq);
        }
        term = term.mul(&q_powers[n - parts.len()]);
        out.push(DerivTuple {
            head,
            parts,
            coeff,
            term,
        });
    }
    Ok(out)
}

fn collect_partitions(
    rest: usize,
    min_part: usize,
    slots: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<(usize, Vec<usize>)>,
    head: usize,
    cap: u64,
) -> Result<(), EngineError> {
    if rest == 0 {
        if out.len() as u64 >= cap {
            return Err(EngineError::TupleCap {
                size: out.len() as u64 + 1,
                cap,
            });
        }
        out.push((head, current.clone()));
        return Ok(());
    }
    if slots == 0 {
        return Ok(());
    }
    for part in min_part..=rest {
        current.push(part);
        collect_partitions(rest - part, part, slots - 1, current, out, head, cap)?;
        current.pop();
    }
    Ok(())
}

/// Reconstruct `sum coeff * term` over an expansion.
pub fn reconstruct<C: Coefficient>(p: u64, tuples: &[DerivTuple<C>]) -> Poly<C> {
    let mut acc = Poly::zero(p);
    for t in tuples {
        if t.coeff == 0 {
            continue;
        }
        let scaled = if t.coeff == 1 {
            t.term.clone()
        } else {
            t.term.scale(&C::from_scalar(p, t.coeff as i64))
        };
        acc = acc.add(&scaled);
    }
    acc
}

#[derive(Debug, Clone, Serialize)]
pub struct TupleBound {
    pub tuple: String,
    pub coeff: u64,
    pub value: ExtValue,
    pub bound: ExtValue,
    pub tight: bool,
}

/// Value of one expansion term against the lower bound
/// `nu(h Q^n) - b * eps(Q)`; tightness must coincide with the structural
/// criterion `head = 0` and every part in the maximizing set of `Q`.
pub fn tuple_value_bound<C: Coefficient>(
    v: &ValuationHandle<C>,
    tuple: &DerivTuple<C>,
    h: &Poly<C>,
    q: &Poly<C>,
    n: usize,
    q_level: &LevelData,
) -> Result<TupleBound, EngineError> {
    let base = v.nu(h)?.checked_add(&v.nu(q)?.mul_nat(n))?;
    if !base.is_finite() {
        return Err(EngineError::InvalidInput(
            "nu(h Q^n) must be finite for the tuple bound".into(),
        ));
    }
    let b = tuple.order();
    let bound = base.checked_sub(&q_level.epsilon.mul_nat(b))?;
    let value = v.nu(&tuple.term)?;
    if value < bound {
        return Err(EngineError::Assertion {
            check: "tuple value bound".into(),
            detail: format!(
                "tuple {} has value {value} below bound {bound}",
                tuple.describe()
            ),
        });
    }
    let tight = value == bound;
    let structural =
        tuple.head == 0 && tuple.parts.iter().all(|part| q_level.argmax.contains(part));
    if tight != structural {
        return Err(EngineError::Assertion {
            check: "tuple tightness criterion".into(),
            detail: format!(
                "tuple {}: tight={tight} but structural={structural} (value {value}, bound {bound})",
                tuple.describe()
            ),
        });
    }
    Ok(TupleBound {
        tuple: tuple.describe(),
        coeff: tuple.coeff,
        value,
        bound,
        tight,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeDrop {
    pub delta: usize,
    pub p_power: u32,
    pub unit: usize,
    pub b_max: usize,
    pub b: usize,
    pub epsilon: ExtValue,
    pub nu_before: ExtValue,
    pub nu_after: ExtValue,
    pub delta_after: usize,
}

/// Split the attaining index `delta = p^e * u` with `p` prime to `u`,
/// differentiate by `b = p^e * b_max`, and check the exact drop of both
/// the truncated value and the attaining index.
pub fn derivative_drop<C: Coefficient>(
    v: &ValuationHandle<C>,
    f: &Poly<C>,
    q: &Poly<C>,
) -> Result<DerivativeDrop, EngineError> {
    let p = f.p();
    let exp = v.expansion_data(f, q)?;
    let delta = exp.delta;
    if delta == 0 {
        return Err(EngineError::InvalidInput(
            "derivative drop needs delta > 0".into(),
        ));
    }
    let q_level = v.level(q)?;
    let b_max = q_level.b_max.ok_or_else(|| {
        EngineError::InvalidInput("key polynomial has empty maximizing set".into())
    })?;
    let mut unit = delta;
    let mut e = 0u32;
    while unit % p as usize == 0 {
        unit /= p as usize;
        e += 1;
    }
    let p_pow_e = (p as usize).pow(e);
    let b = p_pow_e * b_max;
    let df = f.hasse_derivative(b);
    if df.is_zero() {
        return Err(EngineError::Assertion {
            check: "derivative drop".into(),
            detail: format!("d_{b} f vanished for f = {f}"),
        });
    }
    let dexp = v.expansion_data(&df, q)?;
    let expected_nu = exp.nu_q.checked_sub(&q_level.epsilon.mul_nat(b))?;
    if dexp.nu_q != expected_nu {
        return Err(EngineError::Assertion {
            check: "derivative drop value".into(),
            detail: format!(
                "nu_Q(d_{b} f) = {} but nu_Q(f) - b*eps = {expected_nu}",
                dexp.nu_q
            ),
        });
    }
    let expected_delta = delta - p_pow_e;
    if dexp.delta != expected_delta {
        return Err(EngineError::Assertion {
            check: "derivative drop index".into(),
            detail: format!(
                "delta_Q(d_{b} f) = {} but delta - p^e = {expected_delta}",
                dexp.delta
            ),
        });
    }
    Ok(DerivativeDrop {
        delta,
        p_power: e,
        unit,
        b_max,
        b,
        epsilon: q_level.epsilon,
        nu_before: exp.nu_q,
        nu_after: dexp.nu_q,
        delta_after: dexp.delta,
    })
}
