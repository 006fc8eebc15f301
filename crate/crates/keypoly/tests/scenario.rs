//! End-to-end checks of the Artin-Schreier scenario against hand-derived
//! exact values: member values, expansion digits, levels, truncations,
//! membership, and structure analysis.

use std::collections::BTreeSet;

use keypoly::limits::{
    artin_schreier_companion, artin_schreier_family, bound_checks, in_s_alpha, limit_structure,
    remove_high_monomials, SAlphaStatus,
};
use keypoly::{parse_poly, Coefficient, ExtValue, KeyRefutation, Poly, PuiseuxSeries, Rat};

fn ratio(num: i64, den: i64) -> ExtValue {
    ExtValue::Finite(Rat::new(num, den))
}

#[test]
fn member_values_p2() {
    let (family, minimal) = artin_schreier_family(2, 3).unwrap();
    let v = &family.valuation;
    // values -1/4, -1/8, -1/16
    assert_eq!(v.nu(&family.member(1)).unwrap(), ratio(-1, 4));
    assert_eq!(v.nu(&family.member(2)).unwrap(), ratio(-1, 8));
    assert_eq!(v.nu(&family.member(3)).unwrap(), ratio(-1, 16));
    assert_eq!(minimal, parse_poly(2, "x^2 + x + t^(-1)").unwrap());
    assert_eq!(v.nu(&minimal).unwrap(), ExtValue::PosInf);
}

#[test]
fn member_value_certificates_combine_digits_and_evaluation() {
    let (family, _) = artin_schreier_family(2, 4).unwrap();
    let v = &family.valuation;
    // x + theta_3 evaluated: telescoping leaves -1/16
    let q3 = family.member(3);
    assert_eq!(v.nu(&q3).unwrap(), ratio(-1, 16));
    // a constant
    let c: Poly<PuiseuxSeries> = parse_poly(2, "t^(-1)").unwrap();
    assert_eq!(v.nu(&c).unwrap(), ExtValue::from_int(-1));
    // value of x alone: val(theta) = -1/2
    assert_eq!(v.nu(&Poly::x(2)).unwrap(), ratio(-1, 2));
}

#[test]
fn levels_of_members() {
    let (family, minimal) = artin_schreier_family(2, 3).unwrap();
    let v = &family.valuation;
    let lev = v.level(&family.member(3)).unwrap();
    assert_eq!(lev.epsilon, ratio(-1, 16));
    assert_eq!(lev.argmax, BTreeSet::from([1]));
    assert_eq!(lev.b_max, Some(1));

    // levels strictly increase along the family
    let e1 = v.level(&family.member(1)).unwrap().epsilon;
    let e2 = v.level(&family.member(2)).unwrap().epsilon;
    assert!(e1 < e2 && e2 < lev.epsilon);

    // the limit polynomial has infinite level and is never refuted
    let lf = v.level(&minimal).unwrap();
    assert_eq!(lf.epsilon, ExtValue::PosInf);
    let witnesses: Vec<_> = (1..=8).map(|n| family.member(n)).collect();
    match v.refute_key(&minimal, &witnesses).unwrap() {
        KeyRefutation::NotRefuted { .. } => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn truncation_values_p2() {
    let (family, minimal) = artin_schreier_family(2, 3).unwrap();
    let v = &family.valuation;

    // base Q_2: digits [t^(-1/4), 1, 1], values [-1/4, -1/8, -1/4]
    let e2 = v.expansion_data(&minimal, &family.member(2)).unwrap();
    assert_eq!(e2.values, vec![ratio(-1, 4), ratio(-1, 8), ratio(-1, 4)]);
    assert_eq!(e2.nu_q, ratio(-1, 4));
    assert_eq!(e2.min_set, BTreeSet::from([0, 2]));
    assert_eq!(e2.delta, 2);

    // base Q_3: values [-1/8, -1/16, -1/8]
    let e3 = v.expansion_data(&minimal, &family.member(3)).unwrap();
    assert_eq!(e3.values, vec![ratio(-1, 8), ratio(-1, 16), ratio(-1, 8)]);
    assert_eq!(e3.nu_q, ratio(-1, 8));
    assert_eq!(e3.min_set, BTreeSet::from([0, 2]));
    assert_eq!(e3.delta, 2);
    assert_eq!(e3.deg_q, 2);

    // expanding the base by itself
    let q = family.member(2);
    let eq = v.expansion_data(&q, &q).unwrap();
    assert_eq!(eq.min_set, BTreeSet::from([1]));
    assert_eq!(eq.delta, 1);
}

#[test]
fn truncation_values_p3() {
    let (family, minimal) = artin_schreier_family(3, 2).unwrap();
    let v = &family.valuation;
    assert_eq!(v.nu(&family.member(2)).unwrap(), ratio(-1, 27));
    assert_eq!(minimal, parse_poly(3, "x^3 + 2*x + 2*t^(-1)").unwrap());

    let q2 = family.member(2);
    // digits [2t^(-1/9), 2, 0, 1], values [-1/9, -1/27, inf, -1/9]
    let digits = minimal.q_expand(&q2).unwrap();
    assert_eq!(
        digits.digit(0),
        Poly::constant(PuiseuxSeries::monomial(3, Rat::new(-1, 9), 2))
    );
    assert_eq!(
        digits.digit(1),
        Poly::constant(PuiseuxSeries::from_scalar(3, 2))
    );
    assert!(digits.digit(2).is_zero());
    assert_eq!(digits.digit(3), Poly::one(3));

    let e = v.expansion_data(&minimal, &q2).unwrap();
    assert_eq!(
        e.values,
        vec![ratio(-1, 9), ratio(-1, 27), ExtValue::PosInf, ratio(-1, 9)]
    );
    assert_eq!(e.min_set, BTreeSet::from([0, 3]));
    assert_eq!(e.delta, 3);
}

#[test]
fn truncated_value_matches_p_times_member_value() {
    for p in [2u64, 3, 5] {
        let (family, minimal) = artin_schreier_family(p, 4).unwrap();
        let v = &family.valuation;
        for n in 1..=4u32 {
            let e = v.expansion_data(&minimal, &family.member(n)).unwrap();
            let expect = ExtValue::Finite(Rat::from_big(
                num_bigint::BigInt::from(-1),
                num_bigint::BigInt::from(p).pow(n),
            ));
            assert_eq!(e.nu_q, expect, "p={p} n={n}");
            assert_eq!(e.nu_q, v.nu(&family.member(n)).unwrap().mul_nat(p as usize));
        }
    }
}

#[test]
fn membership_examples() {
    let (family, minimal) = artin_schreier_family(2, 4).unwrap();

    let report = in_s_alpha(&family, &minimal, 8).unwrap();
    assert_eq!(report.status, SAlphaStatus::InCertified);
    assert_eq!(report.nu_f, Some(ExtValue::PosInf));

    let companion = artin_schreier_companion(2);
    let report = in_s_alpha(&family, &companion, 8).unwrap();
    assert_eq!(report.status, SAlphaStatus::InCertified);
    assert_eq!(report.nu_f, Some(ExtValue::from_int(1)));
    assert_eq!(report.sup_bound, Some(ExtValue::zero()));

    // x leaves at the first member: digits [theta_1, 1], unique minimum at 0
    let report = in_s_alpha(&family, &Poly::x(2), 8).unwrap();
    assert_eq!(report.status, SAlphaStatus::Out { witness_n: 1 });

    // each member is its own witness
    for k in 1..=4u32 {
        let report = in_s_alpha(&family, &family.member(k), 8).unwrap();
        assert_eq!(report.status, SAlphaStatus::Out { witness_n: k });
    }
}

#[test]
fn structure_analysis_p2() {
    let (family, minimal) = artin_schreier_family(2, 3).unwrap();
    let report = limit_structure(&family, &minimal, 3).unwrap();
    assert_eq!(report.delta, 2);
    assert_eq!(report.r, 1);
    assert!(report.leading_one);
    assert_eq!(report.gamma, 0);
    assert_eq!(report.lambda, vec![1, 2]);
    assert_eq!(report.omega, None);
    // already made of base powers: the projection is the input
    assert_eq!(report.p_part, minimal.to_string());
    assert_eq!(report.nu_trunc_values[2].nu_trunc, ratio(-1, 8));
    assert_eq!(report.membership, SAlphaStatus::InCertified);

    let companion = artin_schreier_companion(2);
    let report = limit_structure(&family, &companion, 3).unwrap();
    assert_eq!(report.delta, 2);
    assert_eq!(report.r, 1);
    assert_eq!(report.p_part, companion.to_string());
    assert_eq!(report.nu_f, Some(ExtValue::from_int(1)));
}

#[test]
fn structure_analysis_p3() {
    let (family, minimal) = artin_schreier_family(3, 2).unwrap();
    let report = limit_structure(&family, &minimal, 2).unwrap();
    assert_eq!(report.delta, 3);
    assert_eq!(report.r, 1);
    assert!(report.leading_one);
    assert_eq!(report.lambda, vec![1, 3]);
    assert_eq!(report.p_part, minimal.to_string());

    // one derivative drop: delta = 3 = 3^1, b = 3, both drops land at 0
    let drop =
        keypoly::deriv::derivative_drop(&family.valuation, &minimal, &family.member(2)).unwrap();
    assert_eq!(drop.delta, 3);
    assert_eq!(drop.p_power, 1);
    assert_eq!(drop.b, 3);
    assert_eq!(drop.nu_after, ExtValue::zero());
    assert_eq!(drop.delta_after, 0);
}

#[test]
fn tuple_bounds_on_a_member_square() {
    // h = 1, Q = Q_3, n = 2, b = 2 over p = 2: the all-ones tuple is the
    // only tight one, with value 0 = nu(Q^2) - 2 eps(Q)
    let (family, _) = artin_schreier_family(2, 3).unwrap();
    let v = &family.valuation;
    let q = family.member(3);
    let h: Poly<PuiseuxSeries> = Poly::one(2);
    let q_level = v.level(&q).unwrap();
    let tuples = keypoly::deriv::leibniz_expand(&h, &q, 2, 2, 1000).unwrap();
    let mut seen_tight = 0;
    for tuple in &tuples {
        let bound = keypoly::deriv::tuple_value_bound(v, tuple, &h, &q, 2, &q_level).unwrap();
        if bound.tight {
            seen_tight += 1;
            assert_eq!(tuple.describe(), "(0; 1,1)");
            assert_eq!(bound.value, ExtValue::zero());
            assert_eq!(bound.bound, ExtValue::zero());
        } else {
            assert_eq!(bound.value, ExtValue::PosInf);
        }
    }
    assert_eq!(seen_tight, 1);
}

#[test]
fn structure_violations_on_higher_degree_members() {
    use keypoly::EngineError;

    let (family, minimal) = artin_schreier_family(2, 4).unwrap();

    // F * x stays in the limit set (infinite value) but its expansion
    // attains the minimum below its degree
    let fx = minimal.mul(&Poly::x(2));
    match limit_structure(&family, &fx, 3) {
        Err(EngineError::Structure { clause, .. }) => {
            assert_eq!(clause, "delta-equals-degree");
        }
        other => panic!("unexpected {other:?}"),
    }

    // F * Q_3 at member 3 attains at its full degree 3, which is not a
    // power of 2
    let fq = minimal.mul(&family.member(3));
    match limit_structure(&family, &fq, 3) {
        Err(EngineError::Structure { clause, .. }) => {
            assert_eq!(clause, "degree-p-power");
        }
        other => panic!("unexpected {other:?}"),
    }

    // a polynomial outside the limit set is rejected up front
    match limit_structure(&family, &Poly::x(2), 3) {
        Err(EngineError::InvalidInput(_)) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn custom_family_without_minimal_is_undetermined() {
    use keypoly::limits::KeyFamily;
    use keypoly::{ThetaApprox, ThetaOracle, ValuationHandle};
    use std::sync::Arc;

    struct Oracle;
    impl ThetaOracle<PuiseuxSeries> for Oracle {
        fn p(&self) -> u64 {
            2
        }
        fn approximant(&self, n: u32) -> ThetaApprox<PuiseuxSeries> {
            let mut value = PuiseuxSeries::zero(2);
            for i in 1..=n {
                value = value.add(&PuiseuxSeries::monomial(2, Rat::new(-1, 1 << i), 1));
            }
            ThetaApprox {
                value,
                tail_val: ExtValue::Finite(Rat::new(-1, 1 << (n + 1))),
            }
        }
        fn describe(&self) -> String {
            "undeclared-minimal oracle".into()
        }
    }

    let oracle = Arc::new(Oracle);
    let valuation = ValuationHandle::evaluation(oracle.clone(), None, 12);
    let generator = {
        let oracle = oracle.clone();
        move |n: u32| {
            Poly::from_coeffs(
                2,
                vec![oracle.approximant(n).value.neg(), PuiseuxSeries::one(2)],
            )
        }
    };
    let family = KeyFamily::new(
        "custom",
        2,
        1,
        ExtValue::zero(),
        ExtValue::zero(),
        1,
        4,
        valuation,
        Arc::new(generator),
    );

    // member values still certify
    assert_eq!(
        family.valuation.nu(&family.member(2)).unwrap(),
        ratio(-1, 8)
    );
    // the limit polynomial's value cannot be certified without the
    // declared minimal polynomial, so membership is undetermined
    let minimal: Poly<PuiseuxSeries> = parse_poly(2, "x^2 + x + t^(-1)").unwrap();
    let report = in_s_alpha(&family, &minimal, 6).unwrap();
    assert_eq!(report.status, SAlphaStatus::Undetermined);
    assert_eq!(report.nu_f, None);
    // the sampled truncation values are still exact
    assert_eq!(report.per_n[2].nu_trunc, ratio(-1, 8));
}

#[test]
fn removal_examples() {
    let (family, minimal) = artin_schreier_family(2, 4).unwrap();

    // the companion's shift sits inside the constant digit: unchanged
    let companion = artin_schreier_companion(2);
    let (result, report) = remove_high_monomials(&family, &companion, 4, 8).unwrap();
    assert_eq!(result, companion);
    assert!(report.removed.is_empty());

    // a perturbation above the bound inside digit 2 is removed
    let q3 = family.member(3);
    let t5 = PuiseuxSeries::monomial(2, Rat::from_int(5), 1);
    let perturbed = minimal.add(&q3.pow(2).scale(&t5));
    let (result, report) = remove_high_monomials(&family, &perturbed, 3, 8).unwrap();
    assert_eq!(result, minimal);
    assert_eq!(report.removed.len(), 1);
    assert_eq!(report.bound, ExtValue::zero());

    // the minimal polynomial itself is untouched
    let (result, report) = remove_high_monomials(&family, &minimal, 3, 8).unwrap();
    assert_eq!(result, minimal);
    assert!(report.removed.is_empty());
}

#[test]
fn comparison_reports_on_members() {
    let (family, minimal) = artin_schreier_family(2, 3).unwrap();
    let v = &family.valuation;
    let q2 = family.member(2);
    let q3 = family.member(3);

    let report = keypoly::compare::compare_same_degree(v, &q2, &q3).unwrap();
    assert_eq!(report.nu_q1, ratio(-1, 8));
    assert_eq!(report.nu_q2, ratio(-1, 16));
    assert!(report.eps_q1 < report.eps_q2);
    assert!(report.clauses.iter().all(|c| c.holds));

    // expansions of the limit polynomial against the two members
    let report = keypoly::compare::compare_expansions(v, &minimal, &q2, &q3).unwrap();
    assert_eq!(report.nu_trunc_q1, ratio(-1, 4));
    assert_eq!(report.nu_trunc_q2, ratio(-1, 8));
    assert_eq!(report.nu_f, ExtValue::PosInf);
    assert_eq!(report.delta_q1, 2);
    assert_eq!(report.delta_q2, 2);
    assert_eq!(report.r, 2);
    assert!(report.clauses.iter().all(|c| c.holds));

    // the companion stays strictly below its value 1 at every member
    let companion = artin_schreier_companion(2);
    let report = keypoly::compare::compare_expansions(v, &companion, &q2, &q3).unwrap();
    assert_eq!(report.nu_f, ExtValue::from_int(1));
    assert_eq!(report.nu_trunc_q1, ratio(-1, 4));
    assert_eq!(report.nu_trunc_q2, ratio(-1, 8));

    // a member compared in its own expansion: both truncations sit at
    // its value; the higher base attains only at the constant digit
    let report = keypoly::compare::compare_expansions(v, &q2, &q2, &q3).unwrap();
    assert_eq!(report.nu_trunc_q1, ratio(-1, 8));
    assert_eq!(report.nu_trunc_q2, ratio(-1, 8));
    assert_eq!(report.delta_q1, 1);
    assert_eq!(report.delta_q2, 0);
    assert_eq!(report.r, 1);
}

#[test]
fn default_witness_refutation() {
    let (family, minimal) = artin_schreier_family(2, 4).unwrap();
    let mut rng = keypoly::rng::Rng::new(11);
    let witnesses = keypoly::limits::default_witnesses(&family, &minimal, &mut rng, 32);
    // monomials below the degree, all four members, and the random draws
    assert!(witnesses.len() >= 2 + 4);
    match family.valuation.refute_key(&minimal, &witnesses).unwrap() {
        KeyRefutation::NotRefuted { .. } => {}
        other => panic!("unexpected {other:?}"),
    }

    // a candidate that shares its level with a smaller polynomial
    let bad: Poly<PuiseuxSeries> = parse_poly(2, "x^2 + t").unwrap();
    let witnesses = keypoly::limits::default_witnesses(&family, &bad, &mut rng, 32);
    match family.valuation.refute_key(&bad, &witnesses).unwrap() {
        KeyRefutation::Refuted {
            witness_level,
            level,
            ..
        } => {
            assert!(witness_level >= level);
        }
        other => panic!("unexpected {other:?}"),
    }

    // degree-one members are never refuted by constants
    let q3 = family.member(3);
    let witnesses = keypoly::limits::default_witnesses(&family, &q3, &mut rng, 16);
    assert!(witnesses.iter().all(|w| w.deg() == Some(0)));
    match family.valuation.refute_key(&q3, &witnesses).unwrap() {
        KeyRefutation::NotRefuted { .. } => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn truncation_equals_digit_product_minimum() {
    // the truncation handle computes digit value + index * base value;
    // check it against direct values of the digit-monomial products
    let (family, minimal) = artin_schreier_family(2, 4).unwrap();
    let v = &family.valuation;
    let companion = artin_schreier_companion(2);
    let mut rng = keypoly::rng::Rng::new(3);
    let profile = keypoly::rng::SampleProfile::default();
    let mut targets = vec![minimal.clone(), companion, Poly::x(2)];
    for _ in 0..12 {
        let f: Poly<PuiseuxSeries> = keypoly::rng::sample_poly(&mut rng, 2, 0, 4, &profile);
        if !f.is_zero() {
            targets.push(f);
        }
    }
    for k in [2u32, 3] {
        let q = family.member(k);
        let trunc = family.truncation(k).unwrap();
        for f in &targets {
            let direct = trunc.nu(f).unwrap();
            let digits = f.q_expand(&q).unwrap();
            let by_products = digits
                .digits
                .iter()
                .enumerate()
                .filter(|(_, d)| !d.is_zero())
                .map(|(i, d)| v.nu(&d.mul(&q.pow(i))).unwrap())
                .min()
                .unwrap();
            assert_eq!(direct, by_products, "f = {f}, member {k}");
        }
    }
}

#[test]
fn concurrent_queries_agree() {
    let (family, minimal) = artin_schreier_family(2, 4).unwrap();
    let v = family.valuation.clone();
    let expect = v.nu(&minimal.mul(&family.member(2))).unwrap();
    let mut handles = vec![];
    for _ in 0..4 {
        let v = v.clone();
        let f = minimal.mul(&family.member(2));
        handles.push(std::thread::spawn(move || v.nu(&f).unwrap()));
    }
    for h in handles {
        assert_eq!(h.join().unwrap(), expect);
    }
}

#[test]
fn evaluation_without_minimal_polynomial() {
    use keypoly::{ThetaApprox, ThetaOracle, ValuationHandle};
    use std::sync::Arc;

    struct Oracle;
    impl ThetaOracle<PuiseuxSeries> for Oracle {
        fn p(&self) -> u64 {
            2
        }
        fn approximant(&self, n: u32) -> ThetaApprox<PuiseuxSeries> {
            let mut value = PuiseuxSeries::zero(2);
            for i in 1..=n {
                value = value.add(&PuiseuxSeries::monomial(2, Rat::new(-1, 1 << i), 1));
            }
            ThetaApprox {
                value,
                tail_val: ExtValue::Finite(Rat::new(-1, 1 << (n + 1))),
            }
        }
        fn describe(&self) -> String {
            "test oracle".into()
        }
    }

    let v = ValuationHandle::evaluation(Arc::new(Oracle), None, 10);
    // ordinary values still certify
    assert_eq!(v.nu(&Poly::x(2)).unwrap(), ratio(-1, 2));
    // without the declared minimal polynomial, its value cannot be
    // certified at any finite depth
    let minimal: Poly<PuiseuxSeries> = parse_poly(2, "x^2 + x + t^(-1)").unwrap();
    assert!(matches!(
        v.nu(&minimal),
        Err(keypoly::EngineError::Undecided { depth: 10 })
    ));
}

#[test]
fn family_bound_checks() {
    for p in [2u64, 3] {
        let (family, _) = artin_schreier_family(p, 6).unwrap();
        let report = bound_checks(&family, 1, 6).unwrap();
        assert!(report.pass);
        assert_eq!(report.members.len(), 6);
        for m in &report.members {
            assert_eq!(m.argmax, vec![1]);
            // d_1 Q is the constant 1, value 0 >= 0 = B - eps_B
            assert_eq!(m.derivative_bounds[0].value, ExtValue::zero());
            assert_eq!(m.derivative_bounds[0].bound, ExtValue::zero());
        }
        assert!(!report.samples.is_empty());
    }
}
