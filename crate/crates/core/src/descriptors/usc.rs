use std::f64::consts::PI;

use super::{bin, require_local, DescriptorKind, DescriptorParams, Feature};
use crate::error::Result;
use crate::index::SpatialIndex;
use crate::patch::LocalPatch;

/// Log-spaced radial shell boundaries from `ratio·r` to `r` (`shells + 1` values).
pub fn usc_radial_edges(r: f64, ratio: f64, shells: usize) -> Vec<f64> {
    let r_min = ratio * r;
    (0..=shells)
        .map(|j| {
            if j == shells {
                r
            } else {
                r_min * (r / r_min).powf(j as f64 / shells as f64)
            }
        })
        .collect()
}

/// Volume of the bin between shells `r0..r1`, polar angles `t0..t1`, and an
/// azimuth wedge of `dphi`.
pub fn usc_bin_volume(r0: f64, r1: f64, t0: f64, t1: f64, dphi: f64) -> f64 {
    (r1.powi(3) - r0.powi(3)) / 3.0 * (t0.cos() - t1.cos()) * dphi
}

/// Contribution of one point: `1 / (ρ · ∛V)`.
pub fn usc_weight(density: usize, volume: f64) -> f64 {
    1.0 / (density as f64 * volume.cbrt())
}

/// Density-weighted 3D shape context.
///
/// The sphere is split into log-spaced radial shells, equal polar-angle
/// elevation bands and equal azimuth wedges. Points closer than
/// `usc_min_radius_ratio·R` are skipped. Each remaining point adds
/// [`usc_weight`] to its bin, with `ρ` the number of patch points within
/// `usc_density_radius_pr · resolution` of it (itself included).
pub fn describe_usc(
    patch: &LocalPatch,
    params: &DescriptorParams,
    resolution: f64,
) -> Result<Feature> {
    require_local(patch)?;
    params.validate()?;
    let r = patch.support_radius;
    let (nk, nl, nj) = (params.usc_elevation, params.usc_azimuth, params.usc_radial);
    let edges = usc_radial_edges(r, params.usc_min_radius_ratio, nj);
    let r_min = edges[0];
    let log_span = (r / r_min).ln();
    let dphi = 2.0 * PI / nl as f64;
    let dtheta = PI / nk as f64;
    let density_radius = params.usc_density_radius_pr * resolution;

    let mut hist = vec![0.0f64; DescriptorKind::Usc.dimension(params)];
    if patch.points.is_empty() {
        return Ok(Feature::real(DescriptorKind::Usc, hist));
    }
    let index = SpatialIndex::build(&patch.points)?;
    for q in &patch.points {
        let dist = q.norm();
        if dist < r_min || dist > r {
            continue;
        }
        let j = bin((dist / r_min).ln(), 0.0, log_span, nj);
        let k = bin(q.xy().norm().atan2(q.z), 0.0, PI, nk);
        let mut phi = q.y.atan2(q.x);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        let l = bin(phi, 0.0, 2.0 * PI, nl);
        let volume = usc_bin_volume(
            edges[j],
            edges[j + 1],
            k as f64 * dtheta,
            (k + 1) as f64 * dtheta,
            dphi,
        );
        let density = index.count_within(q, density_radius).max(1);
        hist[(j * nk + k) * nl + l] += usc_weight(density, volume);
    }
    Ok(Feature::real(DescriptorKind::Usc, hist))
}
