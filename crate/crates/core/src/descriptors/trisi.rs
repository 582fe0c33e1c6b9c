use super::stats::Grid;
use super::{bin, require_local, DescriptorKind, DescriptorParams, Feature};
use crate::error::Result;
use crate::patch::LocalPatch;
use crate::Vec3;

/// Spin-image coordinates of `d = q − p` about the unit axis `v`:
/// `α` is the distance from the axis, `β` the signed height along it.
pub fn spin_coordinates(d: &Vec3, v: &Vec3) -> (f64, f64) {
    let beta = v.dot(d);
    let alpha = (d.norm_squared() - beta * beta).max(0.0).sqrt();
    (alpha, beta)
}

/// Three spin images about the LRF axes, each normalized to unit mass.
pub fn describe_trisi(patch: &LocalPatch, params: &DescriptorParams) -> Result<Feature> {
    require_local(patch)?;
    let n = params.trisi_divisions;
    let r = patch.support_radius;
    let mut out = Vec::with_capacity(DescriptorKind::Trisi.dimension(params));
    for axis in [Vec3::x(), Vec3::y(), Vec3::z()] {
        let mut grid = Grid::zeros(n, n);
        for q in &patch.points {
            let (alpha, beta) = spin_coordinates(q, &axis);
            grid.add(bin(beta, -r, r, n), bin(alpha, 0.0, r, n), 1.0);
        }
        grid.normalize();
        out.extend_from_slice(grid.cells());
    }
    Ok(Feature::real(DescriptorKind::Trisi, out))
}
