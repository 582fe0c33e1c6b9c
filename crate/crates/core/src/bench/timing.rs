use std::hint::black_box;
use std::time::Instant;

use crate::cloud::PointCloud;
use crate::descriptors::{describe, DescriptorKind, DescriptorParams};
use crate::error::{Error, Result};
use crate::lrf::canonical_lrf;
use crate::normals::{estimate_normals_with, DEFAULT_NORMAL_K};
use crate::patch::{extract_spherical_patch, transform_to_lrf, LocalPatch};

use super::correspondence::sample_keypoints;

/// Timed rounds after the warm-up round.
pub const DEFAULT_TIMING_ROUNDS: usize = 10;

/// The support radii of the timing protocol, in pr.
pub fn standard_timing_radii() -> Vec<f64> {
    (1..=6).map(|i| 5.0 * i as f64).collect()
}

/// Local-frame patches extracted at one support radius.
#[derive(Debug, Clone)]
pub struct TimingPatchSet {
    pub radius_pr: f64,
    pub patches: Vec<LocalPatch>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub kind: DescriptorKind,
    pub radius_pr: f64,
    pub patches: usize,
    /// Mean per-patch extraction time over the timed rounds.
    pub mean_ms: f64,
    /// Median over patches of the per-patch mean time.
    pub median_ms: f64,
}

/// Sample `n` keypoints of `cloud` and cut a local-frame patch around each at
/// every radius. Keypoints whose frame is degenerate at some radius are
/// skipped at that radius. Normals are estimated when the cloud has none.
pub fn timing_patches(
    cloud: &PointCloud,
    n: usize,
    radii_pr: &[f64],
    seed: u64,
) -> Result<Vec<TimingPatchSet>> {
    let index = cloud.build_index()?;
    let pr = cloud.resolution()?;
    let owned;
    let cloud = if cloud.normals().is_some() {
        cloud
    } else {
        owned = estimate_normals_with(cloud, &index, DEFAULT_NORMAL_K)?.cloud;
        &owned
    };
    let keypoints = sample_keypoints(cloud, n, seed);
    radii_pr
        .iter()
        .map(|&r_pr| {
            let r = r_pr * pr;
            let mut patches = Vec::with_capacity(keypoints.len());
            for &k in &keypoints {
                let world = extract_spherical_patch(cloud, &index, &cloud.points()[k], r)?;
                if let Ok(lrf) = canonical_lrf(&world) {
                    patches.push(transform_to_lrf(&world, &lrf)?);
                }
            }
            Ok(TimingPatchSet {
                radius_pr: r_pr,
                patches,
            })
        })
        .collect()
}

/// Per-patch extraction time for every kind and radius, measured on the
/// calling thread: one warm-up round, then `rounds` timed rounds.
pub fn time_descriptors(
    sets: &[TimingPatchSet],
    kinds: &[DescriptorKind],
    params: &DescriptorParams,
    resolution: f64,
    rounds: usize,
) -> Result<Vec<TimingRow>> {
    if rounds == 0 {
        return Err(Error::invalid("at least one timed round is required"));
    }
    let mut rows = Vec::new();
    for set in sets {
        if set.patches.is_empty() {
            return Err(Error::invalid(format!(
                "no patches at radius {} pr",
                set.radius_pr
            )));
        }
        for &kind in kinds {
            let mut per_patch = vec![0.0f64; set.patches.len()];
            for round in 0..=rounds {
                for (slot, patch) in per_patch.iter_mut().zip(&set.patches) {
                    let start = Instant::now();
                    black_box(describe(kind, black_box(patch), params, resolution)?);
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    if round > 0 {
                        *slot += ms;
                    }
                }
            }
            for t in &mut per_patch {
                *t = (*t / rounds as f64).max(1e-9);
            }
            let mean_ms = per_patch.iter().sum::<f64>() / per_patch.len() as f64;
            rows.push(TimingRow {
                kind,
                radius_pr: set.radius_pr,
                patches: per_patch.len(),
                mean_ms,
                median_ms: median(&mut per_patch),
            });
        }
    }
    Ok(rows)
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
