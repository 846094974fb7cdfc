//! Property suites; the bodies live in `invariants` so the acceptance run
//! can execute the same checks.

mod invariants;

#[test]
fn entropy_and_dominance_bounds() {
    invariants::entropy_and_dominance_bounds();
}

#[test]
fn dominance_one_iff_entropy_zero() {
    invariants::dominance_one_iff_entropy_zero();
}

#[test]
fn metrics_are_permutation_equivariant() {
    invariants::metrics_are_permutation_equivariant();
}

#[test]
fn m4_equals_m2_on_one_community() {
    invariants::m4_equals_m2_on_one_community();
}

#[test]
fn features_ignore_everything_after_the_early_window() {
    invariants::features_ignore_everything_after_the_early_window();
}
