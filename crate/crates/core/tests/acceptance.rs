//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (run with `--nocapture` to see them all). Every
//! comparison is exact; the only tolerances are the wall-clock budgets
//! stated on the timed criteria.

use std::time::{Duration, Instant};

use branchlink_core::selftest::{self, SuiteResult};

fn check(criterion: usize, result: SuiteResult, budget: Option<Duration>) {
    let elapsed_note = match budget {
        Some(limit) => format!(" (budget {:?})", limit),
        None => String::new(),
    };
    assert!(
        result.passed,
        "acceptance criterion {criterion}: FAIL - {}: {}",
        result.name, result.detail
    );
    println!(
        "acceptance criterion {criterion}: PASS - {}: {}{elapsed_note}",
        result.name, result.detail
    );
}

fn timed(criterion: usize, limit: Duration, suite: impl FnOnce() -> SuiteResult) {
    let start = Instant::now();
    let result = suite();
    let elapsed = start.elapsed();
    assert!(
        elapsed < limit,
        "acceptance criterion {criterion}: FAIL - ran {elapsed:?}, budget {limit:?}"
    );
    check(criterion, result, Some(limit));
}

#[test]
fn criterion_1_standard_link_collapse() {
    timed(1, Duration::from_secs(1), selftest::suite_standard_collapse);
}

#[test]
fn criterion_2_kappa_dim_triple_agreement() {
    timed(2, Duration::from_secs(5), selftest::suite_triple_agreement);
}

#[test]
fn criterion_3_extension_dimension() {
    check(3, selftest::suite_extension_dimension(), None);
}

#[test]
fn criterion_4_translation_invariance() {
    check(4, selftest::suite_translation_invariance(), None);
}

#[test]
fn criterion_5_grade_law_and_base() {
    check(5, selftest::suite_grade_law(), None);
}

#[test]
fn criterion_6_harmonic_correspondence() {
    check(6, selftest::suite_harmonic_correspondence(), None);
}

#[test]
fn criterion_7_binomial_regression() {
    check(7, selftest::suite_binomial_coherence(), None);
}

#[test]
fn criterion_8_dimension_group_suite() {
    timed(8, Duration::from_secs(5), selftest::suite_k0);
}
