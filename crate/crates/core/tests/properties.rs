//! Module invariants as property tests.

mod common;

#[test]
fn exact_sign_agrees_with_intervals() {
    common::sign_vs_interval(5000).unwrap();
}

#[test]
fn enumeration_agrees_with_cube_scan() {
    common::enumeration_vs_cube(40).unwrap();
}

#[test]
fn decomposability_agrees_with_all_pairs() {
    common::decomposability_vs_pairs(1000).unwrap();
}

#[test]
fn round_to_box_lands_in_box() {
    common::round_to_box_membership(5000).unwrap();
}

#[test]
fn representability_is_unit_invariant() {
    common::unit_invariance(1000).unwrap();
}
