//! Comparators for key polynomials of the same degree and for the two
//! expansions of a polynomial with respect to them. Each comparator
//! computes a full value report; a violated clause is an assertion
//! failure carrying the report.

use std::sync::Arc;

use serde::Serialize;

use crate::field::Coefficient;
use crate::poly::Poly;
use crate::valuation::{EngineError, ValuationHandle};
use crate::value::ExtValue;

#[derive(Debug, Clone, Serialize)]
pub struct ClauseCheck {
    pub clause: String,
    pub applicable: bool,
    pub holds: bool,
    pub detail: String,
}

impl ClauseCheck {
    fn vacuous(clause: &str) -> Self {
        ClauseCheck {
            clause: clause.into(),
            applicable: false,
            holds: true,
            detail: "not applicable".into(),
        }
    }

    fn checked(clause: &str, holds: bool, detail: String) -> Self {
        ClauseCheck {
            clause: clause.into(),
            applicable: true,
            holds,
            detail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativePair {
    pub b: usize,
    pub nu_d_q1: ExtValue,
    pub nu_d_q2: ExtValue,
}

/// Report for two key polynomials of the same degree, ordered so that
/// `nu(q1) <= nu(q2)`.
#[derive(Debug, Clone, Serialize)]
pub struct SameDegreeReport {
    pub q1: String,
    pub q2: String,
    pub swapped: bool,
    pub nu_q1: ExtValue,
    pub nu_q2: ExtValue,
    pub eps_q1: ExtValue,
    pub eps_q2: ExtValue,
    pub i_q1: Vec<usize>,
    pub i_q2: Vec<usize>,
    pub derivative_values: Vec<DerivativePair>,
    pub clauses: Vec<ClauseCheck>,
}

fn fail_if_violated(
    check: &str,
    clauses: &[ClauseCheck],
    report: String,
) -> Result<(), EngineError> {
    if let Some(bad) = clauses.iter().find(|c| c.applicable && !c.holds) {
        return Err(EngineError::Assertion {
            check: format!("{check} clause {}", bad.clause),
            detail: format!("{}; report: {report}", bad.detail),
        });
    }
    Ok(())
}

/// Compare two same-degree key polynomials: derivative values agree on
/// the maximizing set, levels and maximizing sets agree or strictly
/// increase with the value, and maximizing orders do not grow.
pub fn compare_same_degree<C: Coefficient>(
    v: &Arc<ValuationHandle<C>>,
    q1: &Poly<C>,
    q2: &Poly<C>,
) -> Result<SameDegreeReport, EngineError> {
    if q1.deg() != q2.deg() || q1.deg().is_none() {
        return Err(EngineError::InvalidInput(
            "same-degree comparison needs equal positive degrees".into(),
        ));
    }
    let mut a = q1.clone();
    let mut b = q2.clone();
    let mut swapped = false;
    if v.nu(&b)? < v.nu(&a)? {
        std::mem::swap(&mut a, &mut b);
        swapped = true;
    }
    let nu1 = v.nu(&a)?;
    let nu2 = v.nu(&b)?;
    let lev1 = v.level(&a)?;
    let lev2 = v.level(&b)?;

    let mut derivative_values = vec![];
    let mut clause_i_holds = true;
    let mut clause_i_detail = String::new();
    for bb in &lev1.argmax {
        let d1 = v.nu(&a.hasse_derivative(*bb))?;
        let d2 = v.nu(&b.hasse_derivative(*bb))?;
        if d1 != d2 {
            clause_i_holds = false;
            clause_i_detail = format!("b={bb}: nu(d_b q2)={d2} != nu(d_b q1)={d1}");
        }
        derivative_values.push(DerivativePair {
            b: *bb,
            nu_d_q1: d1,
            nu_d_q2: d2,
        });
    }
    let clause_i = ClauseCheck::checked(
        "i",
        clause_i_holds,
        if clause_i_holds {
            "derivative values agree on the maximizing set".into()
        } else {
            clause_i_detail
        },
    );

    let clause_ii = if nu1 == nu2 {
        let holds = lev1.epsilon == lev2.epsilon && lev1.argmax == lev2.argmax;
        ClauseCheck::checked(
            "ii",
            holds,
            format!(
                "equal values: eps {} vs {}, I {:?} vs {:?}",
                lev1.epsilon, lev2.epsilon, lev1.argmax, lev2.argmax
            ),
        )
    } else {
        ClauseCheck::vacuous("ii")
    };

    let clause_iii = if nu1 < nu2 {
        let holds = lev1.epsilon < lev2.epsilon;
        ClauseCheck::checked(
            "iii",
            holds,
            format!("eps(q1) = {} < eps(q2) = {}", lev1.epsilon, lev2.epsilon),
        )
    } else {
        ClauseCheck::vacuous("iii")
    };

    let clause_iv = if nu1 < nu2 {
        let mut holds = true;
        let mut detail = String::from("maximizing orders do not grow");
        for b1 in &lev1.argmax {
            for b2 in &lev2.argmax {
                let d2_at_b2 = v.nu(&b.hasse_derivative(*b2))?;
                let d1_at_b2 = v.nu(&a.hasse_derivative(*b2))?;
                let d2_at_b1 = v.nu(&b.hasse_derivative(*b1))?;
                let d1_at_b1 = v.nu(&a.hasse_derivative(*b1))?;
                if d2_at_b2 == d1_at_b2 && d2_at_b1 == d1_at_b1 && b2 > b1 {
                    holds = false;
                    detail = format!("b2={b2} > b1={b1} with matching derivative values");
                }
            }
        }
        ClauseCheck::checked("iv", holds, detail)
    } else {
        ClauseCheck::vacuous("iv")
    };

    let report = SameDegreeReport {
        q1: a.to_string(),
        q2: b.to_string(),
        swapped,
        nu_q1: nu1,
        nu_q2: nu2,
        eps_q1: lev1.epsilon,
        eps_q2: lev2.epsilon,
        i_q1: lev1.argmax.iter().copied().collect(),
        i_q2: lev2.argmax.iter().copied().collect(),
        derivative_values,
        clauses: vec![clause_i, clause_ii, clause_iii, clause_iv],
    };
    fail_if_violated(
        "same-degree comparison",
        &report.clauses,
        format!("{report:?}"),
    )?;
    Ok(report)
}

/// Report comparing the expansions of `f` in two same-degree keys.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionCompareReport {
    pub f: String,
    pub q1: String,
    pub q2: String,
    pub swapped: bool,
    pub nu_f: ExtValue,
    pub nu_trunc_q1: ExtValue,
    pub nu_trunc_q2: ExtValue,
    pub r: usize,
    pub delta_q1: usize,
    pub delta_q2: usize,
    pub digit_values_q1: Vec<ExtValue>,
    pub digit_values_q2: Vec<ExtValue>,
    pub clauses: Vec<ClauseCheck>,
}

/// Check the seven clauses relating the two expansions of `f`:
/// monotone truncations, the attaining index match through `r`, equal
/// digit values at the attaining and leading indices, non-growing
/// attaining index, the gap bound when the attaining index is zero,
/// and strictness of the truncation growth.
pub fn compare_expansions<C: Coefficient>(
    v: &Arc<ValuationHandle<C>>,
    f: &Poly<C>,
    q1: &Poly<C>,
    q2: &Poly<C>,
) -> Result<ExpansionCompareReport, EngineError> {
    if f.is_zero() {
        return Err(EngineError::InvalidInput(
            "expansion comparison of zero".into(),
        ));
    }
    if q1.deg() != q2.deg() || q1.deg().is_none() {
        return Err(EngineError::InvalidInput(
            "expansion comparison needs equal positive degrees".into(),
        ));
    }
    let mut a = q1.clone();
    let mut b = q2.clone();
    let mut swapped = false;
    if v.nu(&b)? < v.nu(&a)? {
        std::mem::swap(&mut a, &mut b);
        swapped = true;
    }
    let nu_q1 = v.nu(&a)?;
    let nu_q2 = v.nu(&b)?;
    let trunc1 = ValuationHandle::truncation(v.clone(), a.clone())?;
    let trunc2 = ValuationHandle::truncation(v.clone(), b.clone())?;

    let nu_f = v.nu(f)?;
    let t1 = trunc1.nu(f)?;
    let t2 = trunc2.nu(f)?;

    let exp1 = v.expansion_data(f, &a)?;
    let exp2 = v.expansion_data(f, &b)?;
    let digits2 = f.q_expand(&b)?;

    // r: the largest index minimizing nu_{Q1}(f_i Q2^i) over the Q2-digits
    let mut under_q1: Vec<ExtValue> = vec![];
    for (i, digit) in digits2.digits.iter().enumerate() {
        if digit.is_zero() {
            under_q1.push(ExtValue::PosInf);
        } else {
            under_q1.push(trunc1.nu(&digit.mul(&b.pow(i)))?);
        }
    }
    let min_under_q1 = under_q1.iter().min().cloned().expect("nonzero expansion");
    let r = under_q1
        .iter()
        .rposition(|w| *w == min_under_q1)
        .expect("attained minimum");

    // (i) monotone: nu_{Q1}(f) <= nu_{Q2}(f) <= nu(f)
    let clause_i = ClauseCheck::checked(
        "i",
        t1 <= t2 && t2 <= nu_f,
        format!("{t1} <= {t2} <= {nu_f}"),
    );

    // (ii) nu_{Q1}(f) = nu_{Q1}(f_r Q2^r) = nu(f_r Q1^r), delta_{Q1}(f) = r
    let fr = digits2.digit(r);
    let fr_q1r = v.nu(&fr.mul(&a.pow(r)))?;
    let clause_ii = ClauseCheck::checked(
        "ii",
        t1 == under_q1[r] && t1 == fr_q1r && exp1.delta == r,
        format!(
            "nu_q1(f)={t1}, nu_q1(f_r q2^r)={}, nu(f_r q1^r)={fr_q1r}, delta_q1={}, r={r}",
            under_q1[r], exp1.delta
        ),
    );

    // (iii) digit values at index delta_{Q1}(f) agree
    let d1_at = digit_value(v, f, &a, exp1.delta)?;
    let d2_at = digit_value(v, f, &b, exp1.delta)?;
    let clause_iii = ClauseCheck::checked(
        "iii",
        d1_at == d2_at,
        format!("digit values at index {}: {d1_at} vs {d2_at}", exp1.delta),
    );

    // (iv) delta_{Q2}(f) <= delta_{Q1}(f)
    let clause_iv = ClauseCheck::checked(
        "iv",
        exp2.delta <= exp1.delta,
        format!("delta_q2 = {} <= delta_q1 = {}", exp2.delta, exp1.delta),
    );

    // (v) leading digit values agree
    let lead1 = digit_value(v, f, &a, exp1.deg_q)?;
    let lead2 = digit_value(v, f, &b, exp2.deg_q)?;
    let clause_v = ClauseCheck::checked(
        "v",
        exp1.deg_q == exp2.deg_q && lead1 == lead2,
        format!("leading digit values: {lead1} vs {lead2}"),
    );

    // (vi) when delta_{Q1}(f) = 0: the value gap of every positive digit
    let clause_vi = if exp1.delta == 0 {
        let gap = nu_q2.checked_sub(&nu_q1)?;
        let f0 = v.nu(&digits2.digit(0))?;
        let mut holds = true;
        let mut detail = String::from("value gaps exceed the key gap");
        for (i, digit) in digits2.digits.iter().enumerate().skip(1) {
            if digit.is_zero() {
                continue;
            }
            let vi = v.nu(&digit.mul(&b.pow(i)))?;
            let lhs = vi.checked_sub(&f0)?;
            let mid = gap.mul_nat(i);
            if !(lhs > mid && mid >= gap) {
                holds = false;
                detail = format!("index {i}: {lhs} vs {mid} vs {gap}");
                break;
            }
        }
        ClauseCheck::checked("vi", holds, detail)
    } else {
        ClauseCheck::vacuous("vi")
    };

    // (vii) strictness
    let clause_vii = if exp2.delta > 0 && nu_q1 < nu_q2 {
        ClauseCheck::checked("vii", t1 < t2, format!("{t1} < {t2}"))
    } else {
        ClauseCheck::vacuous("vii")
    };

    let report = ExpansionCompareReport {
        f: f.to_string(),
        q1: a.to_string(),
        q2: b.to_string(),
        swapped,
        nu_f,
        nu_trunc_q1: t1,
        nu_trunc_q2: t2,
        r,
        delta_q1: exp1.delta,
        delta_q2: exp2.delta,
        digit_values_q1: exp1.values.clone(),
        digit_values_q2: exp2.values.clone(),
        clauses: vec![
            clause_i, clause_ii, clause_iii, clause_iv, clause_v, clause_vi, clause_vii,
        ],
    };
    fail_if_violated(
        "expansion comparison",
        &report.clauses,
        format!("{report:?}"),
    )?;
    Ok(report)
}

/// Value of the bare digit at `index` in the expansion of `f` by `q`.
fn digit_value<C: Coefficient>(
    v: &ValuationHandle<C>,
    f: &Poly<C>,
    q: &Poly<C>,
    index: usize,
) -> Result<ExtValue, EngineError> {
    let digit = f.q_expand(q)?.digit(index);
    if digit.is_zero() {
        return Ok(ExtValue::PosInf);
    }
    v.nu(&digit)
}
