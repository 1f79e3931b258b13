//! Acceptance battery at full size: one test per headline claim,
//! each printing a single pass/fail line with the measured numbers.

use motzkinlab::verify::{check, Profile, CHECK_COUNT};

fn run(id: usize) {
    let report = check(id, Profile::Full).expect("check ran to completion");
    println!("criterion {id}: {}", report);
    assert!(report.passed, "criterion {id} failed: {report}");
}

#[test]
fn criterion_01_ground_state_uniqueness_and_fidelity() {
    run(1);
}

#[test]
fn criterion_02_gap_power_law_scaling() {
    run(2);
}

#[test]
fn criterion_03_half_cut_rank_formula() {
    run(3);
}

#[test]
fn criterion_04_entropy_constant_window() {
    run(4);
}

#[test]
fn criterion_05_half_cut_spectrum_cross_validation() {
    run(5);
}

#[test]
fn criterion_06_transport_term_gap_closed_form() {
    run(6);
}

#[test]
fn criterion_07_embedding_isometry_and_effective_operator() {
    run(7);
}

#[test]
fn criterion_08_walk_stochasticity_and_move_floors() {
    run(8);
}

#[test]
fn criterion_09_pattern_tree_parent_maps() {
    run(9);
}

#[test]
fn criterion_10_stochastic_rule_table_exactness() {
    run(10);
}

#[test]
fn criterion_11_canonical_path_congestion_bound() {
    run(11);
}

#[test]
fn criterion_12_unbalanced_sector_gaps_and_hopping() {
    run(12);
}

#[test]
fn criterion_13_sign_twist_variational_bound() {
    run(13);
}

#[test]
fn criterion_14_count_asymptotics() {
    run(14);
}

#[test]
fn battery_is_complete() {
    assert_eq!(CHECK_COUNT, 14);
}
