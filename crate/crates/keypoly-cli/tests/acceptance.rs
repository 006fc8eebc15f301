//! Acceptance suite: one test per criterion, each printing a pass line
//! and pinning its tolerance (exact equality everywhere) and runtime
//! budget in code.

use std::time::{Duration, Instant};

use keypoly::config;
use keypoly::limits::{
    artin_schreier_companion, artin_schreier_family_with_depth, in_s_alpha, limit_structure,
    SAlphaStatus,
};
use keypoly::report::scenario_report;
use keypoly::rng::{Rng, SampleCoefficient, SampleProfile};
use keypoly::suite::{run_suite, SuiteConfig};
use keypoly::{Coefficient, ExtValue, Poly, PuiseuxSeries, Rat};

const PRIMES: [u64; 3] = [2, 3, 5];
const DEPTH: u32 = 8;
const SEED: u64 = 7;
const CASES: u32 = 64;

fn expected_trunc(p: u64, n: u32) -> ExtValue {
    ExtValue::Finite(Rat::new(-1, (p as i64).pow(n)))
}

fn suite_config(sections: &[&str]) -> SuiteConfig {
    SuiteConfig {
        p: 2,
        seed: SEED,
        cases: CASES,
        pair_max: DEPTH,
        precision_depth: config::DEFAULT_PRECISION_DEPTH,
        sections: sections.iter().map(|s| s.to_string()).collect(),
        ..Default::default()
    }
}

fn run_sections(sections: &[&str], budget: Duration, label: &str) {
    let cfg = suite_config(sections);
    let started = Instant::now();
    let report = run_suite(&cfg).expect("suite runs");
    let elapsed = started.elapsed();
    for section in &report.sections {
        assert!(
            section.pass(),
            "{label}: section {} failed: {:?}",
            section.name,
            section.failures
        );
    }
    assert_eq!(
        report.sections.len(),
        sections.len(),
        "{label}: sections ran"
    );
    assert!(
        elapsed < budget,
        "{label}: took {elapsed:?}, budget {budget:?}"
    );
}

#[test]
fn criterion_1_degree_and_value_structure() {
    // For p in {2, 3, 5} and depth 8, every member satisfies
    // deg_Q(F) = delta_Q(F) = p with leading digit 1 and
    // nu_Q(F) = p * nu(Q) = -1/p^n, exactly; under 10 s per prime.
    for p in PRIMES {
        let started = Instant::now();
        let (family, minimal) = artin_schreier_family_with_depth(
            p,
            DEPTH,
            config::DEFAULT_PRECISION_DEPTH.max(DEPTH + 4),
        )
        .unwrap();
        let v = &family.valuation;
        for n in 1..=DEPTH {
            let q = family.member(n);
            let exp = v.expansion_data(&minimal, &q).unwrap();
            assert_eq!(exp.deg_q, p as usize, "p={p} n={n}: expansion degree");
            assert_eq!(exp.delta, p as usize, "p={p} n={n}: attaining index");
            let digits = minimal.q_expand(&q).unwrap();
            let lead = digits.digit(p as usize);
            assert_eq!(lead.deg(), Some(0), "p={p} n={n}: leading digit degree");
            assert!(lead.coeff(0).is_one(), "p={p} n={n}: leading digit is 1");
            let nu_q = v.nu(&q).unwrap();
            assert_eq!(
                exp.nu_q,
                nu_q.mul_nat(p as usize),
                "p={p} n={n}: truncated value is p * nu(Q)"
            );
            assert_eq!(exp.nu_q, expected_trunc(p, n), "p={p} n={n}: exact value");
        }
        let report = scenario_report(p, DEPTH, config::DEFAULT_PRECISION_DEPTH).unwrap();
        assert!(report.theorem1.pass, "p={p}: report pass flag");
        assert_eq!(report.theorem1.r, 1, "p={p}: power exponent");
        let elapsed = started.elapsed();
        assert!(
            elapsed < Duration::from_secs(10),
            "p={p}: took {elapsed:?}, budget 10s"
        );
    }
    println!("criterion 1 (degree and value structure, p in {{2,3,5}}, depth 8): PASS");
}

#[test]
fn criterion_2_power_index_support() {
    // The expansions of F and of its shift G live on indices {0, 1, p}
    // at every member, exactly.
    for p in PRIMES {
        let (family, minimal) = artin_schreier_family_with_depth(
            p,
            DEPTH,
            config::DEFAULT_PRECISION_DEPTH.max(DEPTH + 4),
        )
        .unwrap();
        let companion = artin_schreier_companion(p);
        for n in 1..=DEPTH {
            let q = family.member(n);
            for (name, f) in [("F", &minimal), ("G", &companion)] {
                let digits = f.q_expand(&q).unwrap();
                let support: Vec<usize> = digits
                    .digits
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| !d.is_zero())
                    .map(|(i, _)| i)
                    .collect();
                assert_eq!(
                    support,
                    vec![0, 1, p as usize],
                    "p={p} n={n}: support of {name}"
                );
            }
        }
        let report = scenario_report(p, DEPTH, config::DEFAULT_PRECISION_DEPTH).unwrap();
        assert!(report.theorem2.pass, "p={p}: report pass flag");
    }
    println!("criterion 2 (power-index support of F and G): PASS");
}

#[test]
fn criterion_3_base_property_suite() {
    // Valuation axioms for monomial and truncation handles, the level
    // product rule, attaining-index additivity, the small-level
    // remainder identity, and the Leibniz rule for Hasse derivatives;
    // seeded, 64 cases each, exact; under 30 s.
    run_sections(
        &[
            "monomial-axioms",
            "truncation-axioms",
            "level-product",
            "delta-additivity",
            "small-level-remainder",
            "hasse-leibniz",
        ],
        Duration::from_secs(30),
        "criterion 3",
    );
    println!("criterion 3 (base property suite, 64 seeded cases per section): PASS");
}

#[test]
fn criterion_4_derivative_interplay_suite() {
    // Leibniz tuple reconstruction on >= 50 samples, the per-tuple value
    // bound with its tightness criterion, the drop bound with the
    // binomial criterion, and both derivative-drop equalities on every
    // scenario sample with a positive attaining index; under 60 s.
    run_sections(
        &[
            "leibniz-reconstruction",
            "tuple-bounds",
            "drop-bound",
            "derivative-drop",
        ],
        Duration::from_secs(60),
        "criterion 4",
    );
    println!("criterion 4 (derivative/truncation interplay suite): PASS");
}

#[test]
fn criterion_5_comparison_suite() {
    // Same-degree comparison clauses and all seven expansion-comparison
    // clauses across every pair (Q_m, Q_n) with m < n <= 8, applied to
    // F, G, and 32 random polynomials; per-member derivative bounds and
    // the eventual maximizing singleton; under 60 s.
    run_sections(
        &["same-degree", "expansion-compare", "family-bounds"],
        Duration::from_secs(60),
        "criterion 5",
    );
    println!("criterion 5 (same-degree and expansion comparison suite): PASS");
}

#[test]
fn criterion_6_membership_semantics() {
    let (family, minimal) =
        artin_schreier_family_with_depth(2, DEPTH, config::DEFAULT_PRECISION_DEPTH).unwrap();

    // F: certified through its infinite value
    let report = in_s_alpha(&family, &minimal, config::DEFAULT_N_MAX).unwrap();
    assert_eq!(report.status, SAlphaStatus::InCertified);
    assert_eq!(report.nu_f, Some(ExtValue::PosInf));

    // G: certified through stabilization, bound 0 below value 1
    let companion = artin_schreier_companion(2);
    let report = in_s_alpha(&family, &companion, config::DEFAULT_N_MAX).unwrap();
    assert_eq!(report.status, SAlphaStatus::InCertified);
    assert_eq!(report.nu_f, Some(ExtValue::from_int(1)));
    assert_eq!(report.sup_bound, Some(ExtValue::zero()));
    assert!(report.sup_bound < report.nu_f);

    // x leaves immediately
    let report = in_s_alpha(&family, &Poly::x(2), config::DEFAULT_N_MAX).unwrap();
    assert_eq!(report.status, SAlphaStatus::Out { witness_n: 1 });

    // every member is its own witness
    for k in 1..=DEPTH {
        let report = in_s_alpha(&family, &family.member(k), config::DEFAULT_N_MAX).unwrap();
        assert_eq!(report.status, SAlphaStatus::Out { witness_n: k });
    }

    // sixteen random monic linear polynomials all leave
    let mut rng = Rng::new(SEED);
    let profile = SampleProfile {
        max_terms: 2,
        max_level: 3,
        exp_range: 3,
    };
    for i in 0..16 {
        let c = PuiseuxSeries::sample(&mut rng, 2, &profile);
        let f = Poly::from_coeffs(2, vec![c, PuiseuxSeries::one(2)]);
        let report = in_s_alpha(&family, &f, config::DEFAULT_N_MAX).unwrap();
        assert!(
            matches!(report.status, SAlphaStatus::Out { .. }),
            "random linear {i} ({f}) should leave, got {:?}",
            report.status
        );
    }
    println!("criterion 6 (membership semantics of the limit set): PASS");
}

#[test]
fn criterion_7_precision_soundness() {
    // Doubling the certification depth changes no certified value in the
    // reports of criteria 1-6: byte-identical JSON after removing the
    // reported depth field.
    let base_depth = config::DEFAULT_PRECISION_DEPTH;
    let doubled = 2 * base_depth;

    fn strip_depth(json: &str) -> String {
        let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
        if let Some(obj) = v.as_object_mut() {
            obj.remove("precision_depth");
        }
        serde_json::to_string_pretty(&v).unwrap()
    }

    for p in PRIMES {
        let a =
            serde_json::to_string_pretty(&scenario_report(p, DEPTH, base_depth).unwrap()).unwrap();
        let b = serde_json::to_string_pretty(&scenario_report(p, DEPTH, doubled).unwrap()).unwrap();
        assert_ne!(a, b, "p={p}: the depth field itself is reported");
        assert_eq!(strip_depth(&a), strip_depth(&b), "p={p}: scenario report");
    }

    // full suite report (criteria 3-6 sections) is byte-identical
    let mut cfg = suite_config(&[]);
    cfg.precision_depth = base_depth;
    let a = serde_json::to_string_pretty(&run_suite(&cfg).unwrap()).unwrap();
    cfg.precision_depth = doubled;
    let b = serde_json::to_string_pretty(&run_suite(&cfg).unwrap()).unwrap();
    assert_eq!(a, b, "suite report");
    assert!(a.contains("\"pass\": true"));

    // membership and structure reports are byte-identical
    for depth_pair in [(base_depth, doubled)] {
        let mut out = vec![];
        for d in [depth_pair.0, depth_pair.1] {
            let (family, minimal) =
                artin_schreier_family_with_depth(2, DEPTH, d.max(DEPTH + 4)).unwrap();
            let membership = in_s_alpha(&family, &minimal, config::DEFAULT_N_MAX).unwrap();
            let structure = limit_structure(&family, &minimal, 3).unwrap();
            out.push((
                serde_json::to_string_pretty(&membership).unwrap(),
                serde_json::to_string_pretty(&structure).unwrap(),
            ));
        }
        assert_eq!(out[0], out[1], "membership/structure reports");
    }
    println!("criterion 7 (precision soundness under doubled depth): PASS");
}
