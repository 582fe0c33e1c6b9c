use std::f64::consts::PI;

use super::rotation::view_rotation;
use super::{require_local, DescriptorKind, DescriptorParams, Feature};
use crate::error::Result;
use crate::patch::LocalPatch;

/// Sector of the ray nearest in angle to `(x, y)`; ray 0 points along +x.
pub(crate) fn ray_sector(x: f64, y: f64, rays: usize) -> usize {
    let gap = 2.0 * PI / rays as f64;
    let mut phi = y.atan2(x);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    ((phi / gap).round() as usize) % rays
}

/// Multi-view contour signatures.
///
/// For each view the rotated patch is projected onto the xy-plane and, per
/// ray sector, the largest planar distance from the keypoint is recorded
/// (divided by `R`; empty sectors read 0).
pub fn describe_rcs(patch: &LocalPatch, params: &DescriptorParams) -> Result<Feature> {
    require_local(patch)?;
    let rays = params.rcs_contours;
    let r = patch.support_radius;
    let mut out = Vec::with_capacity(DescriptorKind::Rcs.dimension(params));
    for k in 0..params.rcs_rotations {
        let rot = view_rotation(k, params.rcs_rotations);
        let mut contour = vec![0.0f64; rays];
        for q in &patch.points {
            let p = rot * q;
            let s = ray_sector(p.x, p.y, rays);
            contour[s] = contour[s].max(p.xy().norm());
        }
        out.extend(contour.into_iter().map(|d| d / r));
    }
    Ok(Feature::real(DescriptorKind::Rcs, out))
}
