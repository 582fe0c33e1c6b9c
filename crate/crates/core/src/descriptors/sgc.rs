use super::{bin, require_local, DescriptorKind, DescriptorParams, Feature};
use crate::error::Result;
use crate::patch::LocalPatch;
use crate::Vec3;

/// Pack quantized centroid coordinates into one integer, `(z·L + y)·L + x`.
pub fn compress_centroid(x: usize, y: usize, z: usize, levels: usize) -> usize {
    (z * levels + y) * levels + x
}

/// Voxelized centroid and point-count signature over the bounding cube.
///
/// Each voxel emits `(C / L³, N / N_max)`, where `C` is the compressed
/// centroid with each voxel-local coordinate quantized to `L` levels. Empty
/// voxels emit `(0, 0)`. Voxels are visited x-fastest.
pub fn describe_sgc(patch: &LocalPatch, params: &DescriptorParams) -> Result<Feature> {
    require_local(patch)?;
    let n = params.sgc_divisions;
    let levels = params.sgc_centroid_levels;
    let h = patch.half_edge();
    let edge = 2.0 * h / n as f64;

    let mut sums = vec![Vec3::zeros(); n * n * n];
    let mut counts = vec![0usize; n * n * n];
    for q in patch.points.iter().filter(|q| q.amax() <= h) {
        let cell = [0, 1, 2].map(|a| bin(q[a], -h, h, n));
        let local =
            Vec3::from_fn(|a, _| ((q[a] + h - cell[a] as f64 * edge) / edge).clamp(0.0, 1.0));
        let v = (cell[2] * n + cell[1]) * n + cell[0];
        sums[v] += local;
        counts[v] += 1;
    }

    let max_count = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let scale = levels.pow(3) as f64;
    let mut out = Vec::with_capacity(DescriptorKind::Sgc.dimension(params));
    for (sum, &count) in sums.iter().zip(&counts) {
        if count == 0 {
            out.extend([0.0, 0.0]);
            continue;
        }
        let c = sum / count as f64;
        let qz = [0, 1, 2].map(|a| ((c[a] * levels as f64).floor() as usize).min(levels - 1));
        out.push(compress_centroid(qz[0], qz[1], qz[2], levels) as f64 / scale);
        out.push(count as f64 / max_count);
    }
    Ok(Feature::real(DescriptorKind::Sgc, out))
}
