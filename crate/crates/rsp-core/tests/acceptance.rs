//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line (run with `--nocapture` to see them all).

use rsp_core::verify::{self, Scale};

const SEED: u64 = 42;

fn assert_check(check: verify::Check) {
    println!("{}", check.line());
    assert!(check.pass, "{}", check.line());
}

#[test]
fn acceptance_01_pi_exactness() {
    assert_check(verify::criterion_01_pi_exactness(SEED, Scale::Full));
}

#[test]
fn acceptance_02_pi_failure_rate() {
    assert_check(verify::criterion_02_pi_failure_rate(SEED, Scale::Full));
}

#[test]
fn acceptance_03_column_method() {
    assert_check(verify::criterion_03_column_method(SEED, Scale::Full));
}

#[test]
fn acceptance_04_resource_headline() {
    assert_check(verify::criterion_04_resource_headline());
}

#[test]
fn acceptance_05_randomization() {
    assert_check(verify::criterion_05_randomization(SEED));
}

#[test]
fn acceptance_06_solver_vs_oracle() {
    assert_check(verify::criterion_06_solver_vs_oracle(SEED));
}

#[test]
fn acceptance_07_curve_properties() {
    assert_check(verify::criterion_07_curve_properties(SEED));
}

#[test]
fn acceptance_08_entangled_endpoints() {
    assert_check(verify::criterion_08_entangled_endpoints(SEED));
}

#[test]
fn acceptance_09_typicality() {
    assert_check(verify::criterion_09_typicality());
}

#[test]
fn acceptance_10_concentration() {
    assert_check(verify::criterion_10_concentration(SEED, Scale::Full));
}

#[test]
fn acceptance_11_obliviousness() {
    assert_check(verify::criterion_11_obliviousness(SEED));
}

#[test]
fn acceptance_12_calculators() {
    assert_check(verify::criterion_12_calculators());
}
