//! The property suite across primes, plus its configuration contract.

use keypoly::suite::{run_suite, SuiteConfig, SECTION_NAMES};
use keypoly::EngineError;

#[test]
fn suite_passes_for_odd_primes() {
    for p in [3u64, 5] {
        let cfg = SuiteConfig {
            p,
            seed: 11,
            cases: 12,
            pair_max: 3,
            ..Default::default()
        };
        let report = run_suite(&cfg).unwrap();
        for s in &report.sections {
            assert!(s.pass(), "p={p}, section {}: {:?}", s.name, s.failures);
        }
        assert!(report.pass);
    }
}

#[test]
fn section_filter_selects_and_validates() {
    let cfg = SuiteConfig {
        sections: vec!["hasse-leibniz".into(), "monomial-axioms".into()],
        cases: 8,
        ..Default::default()
    };
    let report = run_suite(&cfg).unwrap();
    assert_eq!(report.sections.len(), 2);

    let cfg = SuiteConfig {
        sections: vec!["no-such-section".into()],
        ..Default::default()
    };
    assert!(matches!(
        run_suite(&cfg),
        Err(EngineError::InvalidInput(_))
    ));
}

#[test]
fn all_sections_are_runnable() {
    let cfg = SuiteConfig {
        cases: 4,
        pair_max: 3,
        seed: 5,
        ..Default::default()
    };
    let report = run_suite(&cfg).unwrap();
    assert_eq!(report.sections.len(), SECTION_NAMES.len());
    assert!(report.pass);
}
