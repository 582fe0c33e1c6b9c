use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::index::SpatialIndex;
use crate::transform::RigidTransform;

/// A source keypoint and its ground-truth target keypoint, as cloud indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Correspondence {
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceSet {
    pub pairs: Vec<Correspondence>,
    pub transform: RigidTransform,
    /// World-unit tolerance for correspondence validity and match correctness.
    pub inlier_radius: f64,
    /// Number of source keypoints asked for.
    pub requested: usize,
}

impl CorrespondenceSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Fewer pairs survived than were requested.
    pub fn is_short(&self) -> bool {
        self.pairs.len() < self.requested
    }
}

/// `n` distinct source indices, uniform without replacement, ascending.
pub fn sample_keypoints(cloud: &PointCloud, n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, cloud.len(), n.min(cloud.len())).into_vec();
    idx.sort_unstable();
    idx
}

/// Pair each given source keypoint with the target point nearest to its
/// transformed position, dropping pairs farther apart than `inlier_radius`.
pub fn correspondences_for(
    source: &PointCloud,
    keypoints: &[usize],
    target_index: &SpatialIndex,
    transform: &RigidTransform,
    inlier_radius: f64,
) -> Result<CorrespondenceSet> {
    if !(inlier_radius >= 0.0) {
        return Err(Error::invalid(format!(
            "inlier radius must be non-negative, got {inlier_radius}"
        )));
    }
    let pts = source.points();
    let pairs: Vec<Correspondence> = keypoints
        .iter()
        .filter_map(|&s| {
            let (t, d) = target_index.nearest(&transform.apply(&pts[s]));
            (d <= inlier_radius).then_some(Correspondence {
                source: s,
                target: t,
            })
        })
        .collect();
    if pairs.is_empty() {
        return Err(Error::EmptyCorrespondences);
    }
    Ok(CorrespondenceSet {
        pairs,
        transform: *transform,
        inlier_radius,
        requested: keypoints.len(),
    })
}

/// Sample `n` source keypoints and locate their ground-truth correspondents.
///
/// When fewer than `n` pairs survive the inlier test the survivors are
/// returned and [`CorrespondenceSet::is_short`] reports it.
pub fn sample_correspondences(
    source: &PointCloud,
    target: &PointCloud,
    transform: &RigidTransform,
    n: usize,
    seed: u64,
    inlier_radius: f64,
) -> Result<CorrespondenceSet> {
    if n == 0 {
        return Err(Error::invalid("at least one keypoint must be requested"));
    }
    let index = target.build_index()?;
    let keypoints = sample_keypoints(source, n, seed);
    let mut set = correspondences_for(source, &keypoints, &index, transform, inlier_radius)?;
    set.requested = n;
    Ok(set)
}
