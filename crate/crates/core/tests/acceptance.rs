//! Acceptance criteria 1 to 12. Each test prints one PASS/FAIL line.
//!
//! Run with `cargo test -p joint-select-core --test acceptance -- --nocapture`
//! to see the lines.

use std::fs;
use std::time::{Duration, Instant};

use joint_select::experiment::config::DEFAULT_SEED;
use joint_select::experiment::run_verification_suite;
use joint_select::experiment::verify::{self, CheckResult};

fn report(criterion: u8, budget: Duration, run: impl FnOnce() -> CheckResult) {
    let start = Instant::now();
    let c = run();
    let took = start.elapsed();
    assert_eq!(c.id, criterion);
    println!(
        "criterion {criterion:>2}: {} ({:.1}s, budget {}s)",
        c.line(),
        took.as_secs_f64(),
        budget.as_secs()
    );
    assert!(c.passed, "criterion {criterion} failed: {}", c.line());
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

#[test]
fn criterion_01_calibration() {
    report(1, secs(1), || verify::check_calibration().unwrap());
}

#[test]
fn criterion_02_normalizer() {
    report(2, secs(5), || verify::check_normalizer().unwrap());
}

#[test]
fn criterion_03_bijection() {
    report(3, secs(30), || verify::check_bijection().unwrap());
}

#[test]
fn criterion_04_unanchored_gain() {
    report(4, secs(120), || verify::check_unanchored_gain().unwrap());
}

#[test]
fn criterion_05_closed_form() {
    report(5, secs(10), || verify::check_closed_form().unwrap());
}

#[test]
fn criterion_06_human_lead_region() {
    report(6, secs(10), || verify::check_human_lead_region().unwrap());
}

#[test]
fn criterion_07_algorithm_lead_region() {
    report(7, secs(10), || verify::check_algo_lead_region().unwrap());
}

#[test]
fn criterion_08_asymmetry() {
    report(8, secs(1), || {
        verify::check_asymmetry(DEFAULT_SEED).unwrap()
    });
}

#[test]
fn criterion_09_full_anchoring_loss() {
    report(9, secs(60), || verify::check_full_anchoring_loss().unwrap());
}

#[test]
fn criterion_10_anchoring_sweep() {
    report(10, secs(120), || {
        verify::check_anchoring_sweep(DEFAULT_SEED).unwrap()
    });
}

#[test]
fn criterion_11_random_utility() {
    report(11, secs(300), || verify::check_rum(DEFAULT_SEED).unwrap());
}

#[test]
fn criterion_12_determinism() {
    let start = Instant::now();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_verification_suite(DEFAULT_SEED, Some(a.path())).unwrap();
    let second = run_verification_suite(DEFAULT_SEED, Some(b.path())).unwrap();
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let mut identical = true;
    let mut csvs = 0;
    for name in &names {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        if name.to_string_lossy().ends_with(".csv") {
            csvs += 1;
        }
        identical &= x == y;
    }
    let inner = first.checks.iter().find(|c| c.id == 12).unwrap();
    let passed = identical && csvs == 12 && inner.passed && first.all_passed == second.all_passed;
    println!(
        "criterion 12: {} [12] determinism: two suite runs, {csvs} CSVs + report byte-identical: {identical}; in-suite rerun: {} ({:.1}s)",
        if passed { "PASS" } else { "FAIL" },
        inner.passed,
        start.elapsed().as_secs_f64()
    );
    for c in &first.checks {
        println!("  suite {}", c.line());
    }
    assert!(passed);
}
