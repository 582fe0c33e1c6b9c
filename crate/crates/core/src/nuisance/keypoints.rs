use rayon::prelude::*;

use crate::bench::{Correspondence, CorrespondenceSet};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Replace every target keypoint by the cloud point whose distance to it is
/// closest to `d_key_pr · resolution` (lowest index on ties). Source
/// keypoints are never touched.
pub fn perturb_keypoints(
    target: &PointCloud,
    correspondences: &CorrespondenceSet,
    d_key_pr: f64,
    resolution: f64,
) -> Result<CorrespondenceSet> {
    if !(d_key_pr >= 0.0) {
        return Err(Error::invalid(format!(
            "keypoint error must be non-negative, got {d_key_pr}"
        )));
    }
    if d_key_pr == 0.0 {
        return Ok(correspondences.clone());
    }
    let d = d_key_pr * resolution;
    let pts = target.points();
    let pairs = correspondences
        .pairs
        .par_iter()
        .map(|c| {
            let anchor = pts[c.target];
            let mut best = (f64::INFINITY, c.target);
            for (j, p) in pts.iter().enumerate() {
                let gap = ((p - anchor).norm() - d).abs();
                if gap < best.0 {
                    best = (gap, j);
                }
            }
            Correspondence {
                source: c.source,
                target: best.1,
            }
        })
        .collect();
    Ok(CorrespondenceSet {
        pairs,
        ..correspondences.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::RigidTransform;
    use crate::Vec3;

    fn setup() -> (PointCloud, CorrespondenceSet) {
        let cloud = PointCloud::new(
            (0..100)
                .map(|i| Vec3::new((i % 10) as f64, (i / 10) as f64, 0.0))
                .collect(),
        )
        .unwrap();
        let set = CorrespondenceSet {
            pairs: vec![
                Correspondence {
                    source: 0,
                    target: 55,
                },
                Correspondence {
                    source: 1,
                    target: 23,
                },
            ],
            transform: RigidTransform::identity(),
            inlier_radius: 2.0,
            requested: 2,
        };
        (cloud, set)
    }

    #[test]
    fn zero_error_is_identity() {
        let (cloud, set) = setup();
        assert_eq!(perturb_keypoints(&cloud, &set, 0.0, 1.0).unwrap(), set);
    }

    #[test]
    fn unit_error_snaps_to_axis_neighbor() {
        let (cloud, set) = setup();
        let out = perturb_keypoints(&cloud, &set, 1.0, 1.0).unwrap();
        for (a, b) in set.pairs.iter().zip(&out.pairs) {
            assert_eq!(a.source, b.source);
            let d = (cloud.points()[a.target] - cloud.points()[b.target]).norm();
            assert!((d - 1.0).abs() < 1e-12);
        }
        // Lowest-index neighbor of 55 at distance 1 is 45.
        assert_eq!(out.pairs[0].target, 45);
    }
}
