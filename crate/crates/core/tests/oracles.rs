mod common;

use localfeat::bench::compute_auc;

#[test]
fn resolution_matches_all_pairs_scan() {
    let err = common::resolution_error();
    assert!(err <= 1e-9, "resolution error {err}");
}

#[test]
fn index_queries_match_linear_scan() {
    assert_eq!(common::index_mismatches(), 0);
}

#[test]
fn moments_and_entropy_match_direct_sums() {
    let err = common::moment_entropy_error();
    assert!(err <= 1e-12, "moment/entropy error {err}");
}

#[test]
fn auc_matches_riemann_sum() {
    let err = common::auc_error();
    assert!(err <= 1e-6, "auc error {err}");
}

#[test]
fn auc_conventions_match_riemann_sum() {
    // Unsorted input, repeated abscissae and a curve that starts late.
    let pts = [(0.6, 0.9), (0.2, 0.3), (0.2, 0.5), (0.9, 0.9)];
    let err = (compute_auc(&pts) - common::riemann_auc(&pts, 4_000_000)).abs();
    assert!(err <= 1e-6, "{err}");
}

#[test]
fn usc_matches_direct_evaluation() {
    let err = common::usc_error();
    assert!(err <= 1e-9, "usc relative error {err}");
}

#[test]
fn match_counts_match_brute_force() {
    assert_eq!(common::match_count_mismatches(), 0);
}
