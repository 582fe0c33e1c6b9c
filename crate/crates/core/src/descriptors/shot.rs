use std::f64::consts::PI;

use super::{bin, require_local, DescriptorKind, DescriptorParams, Feature};
use crate::error::{Error, Result};
use crate::patch::LocalPatch;

/// Spatial sub-volume of a local-frame point, as `(radial, elevation, azimuth)`.
fn sub_volume(q: &crate::Vec3, r: f64, p: &DescriptorParams) -> (usize, usize, usize) {
    let az = bin(q.y.atan2(q.x) + PI, 0.0, 2.0 * PI, p.shot_azimuth);
    let polar = q.xy().norm().atan2(q.z);
    let el = bin(polar, 0.0, PI, p.shot_elevation);
    let rad = bin(q.norm(), 0.0, r, p.shot_radial);
    (rad, el, az)
}

/// Normal-orientation histograms over a radial × elevation × azimuth split of
/// the support sphere.
///
/// Each point votes (hard assignment) into the bin of `cos(n, z)` of its
/// sub-volume; the concatenation is L2-normalized.
pub fn describe_shot(patch: &LocalPatch, params: &DescriptorParams) -> Result<Feature> {
    require_local(patch)?;
    let normals = patch
        .normals
        .as_ref()
        .ok_or_else(|| Error::invalid("SHOT needs normals"))?;
    let nb = params.shot_bins;
    let mut hist = vec![0.0f64; DescriptorKind::Shot.dimension(params)];
    for (q, n) in patch.points.iter().zip(normals) {
        let (rad, el, az) = sub_volume(q, patch.support_radius, params);
        let sub = (rad * params.shot_elevation + el) * params.shot_azimuth + az;
        let cos = n.z.clamp(-1.0, 1.0);
        hist[sub * nb + bin(cos, -1.0, 1.0, nb)] += 1.0;
    }
    let norm = hist.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        hist.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(Feature::real(DescriptorKind::Shot, hist))
}
