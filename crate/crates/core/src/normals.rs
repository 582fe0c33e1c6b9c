use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::index::SpatialIndex;
use crate::Vec3;

/// Neighborhood size for covariance normals.
pub const DEFAULT_NORMAL_K: usize = 20;

/// Result of normal estimation: the cloud with normals attached plus the
/// indices whose neighborhood covariance was degenerate (those get `+z`).
#[derive(Debug, Clone)]
pub struct NormalEstimation {
    pub cloud: PointCloud,
    pub degenerate: Vec<usize>,
}

/// Eigen-decomposition of a symmetric 3×3 matrix, eigenvalues ascending.
pub(crate) fn sorted_eigen(cov: Matrix3<f64>) -> ([f64; 3], [Vec3; 3]) {
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.map(|i| eig.eigenvalues[i]);
    let vectors = order.map(|i| eig.eigenvectors.column(i).into_owned().normalize());
    (values, vectors)
}

/// Centroid and mean-normalized covariance of a point set.
pub(crate) fn covariance<'a>(
    points: impl Iterator<Item = &'a Vec3> + Clone,
) -> (Vec3, Matrix3<f64>) {
    let mut n = 0usize;
    let mut centroid = Vec3::zeros();
    for p in points.clone() {
        centroid += p;
        n += 1;
    }
    centroid /= n.max(1) as f64;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    (centroid, cov / n.max(1) as f64)
}

/// Flip `n` so that `n·reference ≥ 0`; exact ties point toward +z.
pub(crate) fn orient(n: Vec3, reference: &Vec3) -> Vec3 {
    let d = n.dot(reference);
    if d > 0.0 {
        n
    } else if d < 0.0 {
        -n
    } else if (n.z, n.y, n.x) >= (0.0, 0.0, 0.0) {
        n
    } else {
        -n
    }
}

fn normal_at(cloud: &PointCloud, index: &SpatialIndex, i: usize, k: usize) -> (Vec3, bool) {
    let p = cloud.points()[i];
    let hood = index.knn(&p, k + 1);
    let pts = cloud.points();
    let (centroid, cov) = covariance(hood.iter().map(|&(j, _)| &pts[j]));
    if cov.trace() <= 1e-30 {
        return (Vec3::z(), true);
    }
    let (_, vecs) = sorted_eigen(cov);
    (orient(vecs[0], &(p - centroid)), false)
}

/// PCA normals from the `k` nearest neighbors of every point.
pub fn estimate_normals(cloud: &PointCloud, k: usize) -> Result<NormalEstimation> {
    if k == 0 || cloud.len() < k + 1 {
        return Err(Error::invalid(format!(
            "normal estimation with k = {k} needs at least {} points, got {}",
            k + 1,
            cloud.len()
        )));
    }
    let index = cloud.build_index()?;
    estimate_normals_with(cloud, &index, k)
}

pub fn estimate_normals_with(
    cloud: &PointCloud,
    index: &SpatialIndex,
    k: usize,
) -> Result<NormalEstimation> {
    if k == 0 || cloud.len() < k + 1 {
        return Err(Error::invalid(format!(
            "normal estimation with k = {k} needs at least {} points",
            k + 1
        )));
    }
    let results: Vec<(Vec3, bool)> = (0..cloud.len())
        .into_par_iter()
        .map(|i| normal_at(cloud, index, i, k))
        .collect();
    let degenerate: Vec<usize> = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.1.then_some(i))
        .collect();
    if !degenerate.is_empty() {
        log::warn!(
            "{} points have degenerate neighborhoods; normals set to +z",
            degenerate.len()
        );
    }
    let mut out = cloud.clone();
    out.set_normals(results.into_iter().map(|r| r.0).collect())?;
    Ok(NormalEstimation {
        cloud: out,
        degenerate,
    })
}
