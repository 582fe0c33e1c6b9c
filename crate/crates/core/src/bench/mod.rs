//! Correspondence sampling, ratio-test matching, recall versus 1-precision
//! curves, scene statistics, timing, and the benchmark runner.

mod correspondence;
mod matching;
mod pipeline;
mod rpc;
mod scene;
mod timing;

pub use correspondence::{
    correspondences_for, sample_correspondences, sample_keypoints, Correspondence,
    CorrespondenceSet,
};
pub use matching::{count_matches, match_features, nearest_two, MatchCounts, NearestPair};
pub use pipeline::{
    keypoint_seed, lrf_seed, mix_seed, nuisance_seed, parse_conditions, run_benchmark,
    BenchOptions, BenchPair, BenchReport, CellResult, Condition, KindRun, PairFailure,
    PairFeatures, PairRun, PreparedPair,
};
pub use rpc::{compute_auc, compute_rpc, tau_grid, RpcCurve, RpcPoint, DEFAULT_TAU_STEPS};
pub use scene::{compute_clutter_occlusion, compute_overlap, default_tolerance, GroupKey};
pub use timing::{
    standard_timing_radii, time_descriptors, timing_patches, TimingPatchSet, TimingRow,
    DEFAULT_TIMING_ROUNDS,
};
