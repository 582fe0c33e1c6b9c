use std::f64::consts::PI;

use super::rotation::{about_axis, rotate_all};
use super::stats::{central_moment_unchecked, shannon_entropy_unchecked, Grid};
use super::{bin, require_local, DescriptorKind, DescriptorParams, Feature};
use crate::error::Result;
use crate::patch::LocalPatch;
use crate::Vec3;

/// Coordinate pairs of the xy, yz and xz projections.
pub(crate) const PLANES: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

/// Point density of a 2D projection over its bounding rectangle, unit mass.
fn distribution_map(points: &[Vec3], (u, v): (usize, usize), n: usize) -> Grid {
    let mut grid = Grid::zeros(n, n);
    if points.is_empty() {
        return grid;
    }
    let (mut umin, mut umax, mut vmin, mut vmax) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in points {
        umin = umin.min(p[u]);
        umax = umax.max(p[u]);
        vmin = vmin.min(p[v]);
        vmax = vmax.max(p[v]);
    }
    for p in points {
        let i = if umax > umin {
            bin(p[u], umin, umax, n)
        } else {
            0
        };
        let j = if vmax > vmin {
            bin(p[v], vmin, vmax, n)
        } else {
            0
        };
        grid.add(i, j, 1.0);
    }
    grid.normalize();
    grid
}

/// Rotational projection statistics.
///
/// The patch is turned about each LRF axis by `k·π/n_rot`; every view is
/// projected onto the three coordinate planes, binned into a density map over
/// its bounding rectangle, and summarized by `μ11, μ21, μ12, μ22` and entropy.
pub fn describe_rops(patch: &LocalPatch, params: &DescriptorParams) -> Result<Feature> {
    require_local(patch)?;
    let n_rot = params.rops_rotations;
    let n = params.rops_divisions;
    let mut out = Vec::with_capacity(DescriptorKind::Rops.dimension(params));
    for axis in 0..3 {
        for k in 0..n_rot {
            let theta = k as f64 * PI / n_rot as f64;
            let rotated = rotate_all(&patch.points, &about_axis(axis, theta));
            for plane in PLANES {
                let d = distribution_map(&rotated, plane, n);
                if d.sum() > 0.0 {
                    out.push(central_moment_unchecked(&d, 1, 1));
                    out.push(central_moment_unchecked(&d, 2, 1));
                    out.push(central_moment_unchecked(&d, 1, 2));
                    out.push(central_moment_unchecked(&d, 2, 2));
                    out.push(shannon_entropy_unchecked(&d));
                } else {
                    out.extend([0.0; 5]);
                }
            }
        }
    }
    Ok(Feature::real(DescriptorKind::Rops, out))
}
