use std::time::Instant;

use findeg::suites::{run_suite, SuiteConfig, Verdict, SUITES};

#[test]
fn every_suite_passes() {
    let config = SuiteConfig {
        seed: 7,
        ..SuiteConfig::default()
    };
    for name in SUITES {
        let t = Instant::now();
        let report = run_suite(name, &config).unwrap();
        eprintln!("{name}: {} checks in {:.1?}", report.checks.len(), t.elapsed());
        for c in report.checks.iter().filter(|c| c.verdict != Verdict::Pass) {
            eprintln!("  {:?} {}: {}", c.verdict, c.name, c.detail);
        }
        assert!(report.all_passed(), "{name}");
        assert_eq!(report.exit_code(), 0);
    }
}

#[test]
fn unknown_suite_is_rejected() {
    assert!(run_suite("lemma-99", &SuiteConfig::default()).is_err());
}
