use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::Vec3;

/// Independent zero-mean Gaussian noise on every coordinate, with standard
/// deviation `sigma_pr · resolution`. Normals are dropped.
pub fn add_gaussian_noise(
    cloud: &PointCloud,
    sigma_pr: f64,
    resolution: f64,
    seed: u64,
) -> Result<PointCloud> {
    if !(sigma_pr >= 0.0) {
        return Err(Error::invalid(format!(
            "noise level must be non-negative, got {sigma_pr}"
        )));
    }
    if sigma_pr == 0.0 {
        return Ok(cloud.clone());
    }
    let sigma = sigma_pr * resolution;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = cloud
        .points()
        .iter()
        .map(|p| {
            let n = Vec3::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            );
            p + n * sigma
        })
        .collect();
    PointCloud::new(points)
}

/// Move `round(ratio · n)` points, chosen uniformly without replacement, by
/// `distance` along their (outward) normals.
pub fn add_shot_noise(
    cloud: &PointCloud,
    ratio: f64,
    distance: f64,
    seed: u64,
) -> Result<PointCloud> {
    let normals = cloud
        .normals()
        .ok_or_else(|| Error::invalid("shot noise needs normals"))?;
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::invalid(format!(
            "shot-noise ratio must lie in [0, 1], got {ratio}"
        )));
    }
    let count = (ratio * cloud.len() as f64).round() as usize;
    if count == 0 {
        return Ok(cloud.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = cloud.points().to_vec();
    for i in sample(&mut rng, cloud.len(), count) {
        points[i] += normals[i] * distance;
    }
    PointCloud::with_normals(points, normals.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(n: usize) -> PointCloud {
        let pts: Vec<Vec3> = (0..n)
            .map(|i| Vec3::new((i % 40) as f64, (i / 40) as f64, 0.0))
            .collect();
        let normals = vec![Vec3::z(); n];
        PointCloud::with_normals(pts, normals).unwrap()
    }

    #[test]
    fn zero_sigma_is_identity() {
        let c = plane(100);
        let out = add_gaussian_noise(&c, 0.0, 1.0, 1).unwrap();
        assert_eq!(out.points(), c.points());
    }

    #[test]
    fn shot_noise_moves_exact_count_by_exact_distance() {
        let c = plane(1000);
        let out = add_shot_noise(&c, 0.03, 12.0, 5).unwrap();
        let moved: Vec<f64> = c
            .points()
            .iter()
            .zip(out.points())
            .map(|(a, b)| (a - b).norm())
            .filter(|d| *d > 0.0)
            .collect();
        assert_eq!(moved.len(), 30);
        assert!(moved.iter().all(|d| (d - 12.0).abs() < 1e-12));
        assert_eq!(
            add_shot_noise(&c, 0.0, 12.0, 5).unwrap().points(),
            c.points()
        );
    }

    #[test]
    fn shot_noise_needs_normals() {
        let c = PointCloud::new(vec![Vec3::zeros(); 3]).unwrap();
        assert!(add_shot_noise(&c, 0.5, 1.0, 0).is_err());
    }
}
