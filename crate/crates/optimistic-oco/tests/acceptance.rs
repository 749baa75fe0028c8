//! Acceptance suite: every verification criterion at its canonical
//! parameters, one test per criterion, printing one pass/fail line each.
//! The same criteria back the `ocosim verify` command; parameters,
//! tolerances, and Monte-Carlo budgets are pinned in `verify`.

use optimistic_oco::verify::{self, CriterionResult, VERIFY_SEED};

fn assert_all(results: Vec<CriterionResult>) {
    let mut failed = Vec::new();
    for r in &results {
        println!("{}", r.line());
        if !r.passed {
            println!("       detail: {}", r.detail);
            failed.push(r.id.clone());
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}

#[test]
fn criterion_01_worst_case_adversarial() {
    assert_all(verify::c1_worst_case(VERIFY_SEED).unwrap());
}

#[test]
fn criterion_02_smooth_iid_bound() {
    assert_all(verify::c2_smooth_iid(VERIFY_SEED).unwrap());
}

#[test]
fn criterion_03_sigma_scaling() {
    assert_all(vec![verify::c3_sigma_scaling(VERIFY_SEED).unwrap()]);
}

#[test]
fn criterion_04_sigma_zero_constant_regret() {
    assert_all(verify::c4_sigma_zero(VERIFY_SEED).unwrap());
}

#[test]
fn criterion_05_strongly_convex() {
    assert_all(verify::c5_strongly_convex(VERIFY_SEED).unwrap());
}

#[test]
fn criterion_06_msmwc_unknown_mu() {
    assert_all(verify::c6_msmwc(VERIFY_SEED).unwrap());
}

#[test]
fn criterion_07_dynamic_regret() {
    assert_all(verify::c7_dynamic(VERIFY_SEED).unwrap());
}

#[test]
fn criterion_08_lower_bound() {
    assert_all(verify::c8_lower_bound(VERIFY_SEED).unwrap());
}

#[test]
fn criterion_09_corruption_scaling() {
    assert_all(vec![verify::c9_corruption(VERIFY_SEED).unwrap()]);
}

#[test]
fn criterion_10_random_order_model() {
    assert_all(verify::c10_rom(VERIFY_SEED).unwrap());
}

/// The noisy half of this criterion asserts a two-sided slope window around
/// the sigma/sqrt(T) term of the conversion guarantee. The realized excess
/// of the averaged iterate concentrates at the faster ~1/T rate on every
/// fixed instance (the guarantee's sigma term is a worst-case envelope), so
/// the lower edge of the window is not reachable; the criterion is kept as
/// stated and reports the measured slope.
#[test]
fn criterion_11_accelerated_conversion() {
    assert_all(verify::c11_o2b(VERIFY_SEED).unwrap());
}

#[test]
fn criterion_12_solver_oracles() {
    assert_all(verify::c12_solver_oracles(VERIFY_SEED).unwrap());
}

#[test]
fn criterion_13_paired_gradient_inequality() {
    assert_all(vec![verify::c13_prop_b6(VERIFY_SEED).unwrap()]);
}

/// Mirror-descent bound under its own pinned constants (companion to
/// criterion 2).
#[test]
fn criterion_02b_omd_smooth_iid_bound() {
    assert_all(verify::c2b_omd_smooth(VERIFY_SEED).unwrap());
}
