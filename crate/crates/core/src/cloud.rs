use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::index::SpatialIndex;
use crate::Vec3;

/// An ordered set of 3D points with optional unit normals.
///
/// The point cloud resolution (`pr`, the mean nearest-neighbor distance) is
/// computed lazily and cached; every length in the benchmark is expressed in
/// multiples of it.
#[derive(Debug, Clone, Default)]
pub struct PointCloud {
    points: Vec<Vec3>,
    normals: Option<Vec<Vec3>>,
    resolution: OnceLock<f64>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::invalid(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
        Ok(PointCloud {
            points,
            normals: None,
            resolution: OnceLock::new(),
        })
    }

    pub fn with_normals(points: Vec<Vec3>, normals: Vec<Vec3>) -> Result<Self> {
        let mut cloud = Self::new(points)?;
        cloud.set_normals(normals)?;
        Ok(cloud)
    }

    pub fn set_normals(&mut self, normals: Vec<Vec3>) -> Result<()> {
        if normals.len() != self.points.len() {
            return Err(Error::invalid(format!(
                "{} normals for {} points",
                normals.len(),
                self.points.len()
            )));
        }
        if let Some(i) = normals.iter().position(|n| (n.norm() - 1.0).abs() > 1e-6) {
            return Err(Error::invalid(format!("normal {i} is not unit length")));
        }
        self.normals = Some(normals);
        Ok(())
    }

    pub fn clear_normals(&mut self) {
        self.normals = None;
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn normals(&self) -> Option<&[Vec3]> {
        self.normals.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cached resolution, if it has been computed or set.
    pub fn cached_resolution(&self) -> Option<f64> {
        self.resolution.get().copied()
    }

    /// Record a known resolution; ignored if one is already cached.
    pub fn set_resolution(&self, pr: f64) -> Result<()> {
        if !(pr > 0.0 && pr.is_finite()) {
            return Err(Error::invalid(format!(
                "resolution must be positive, got {pr}"
            )));
        }
        let _ = self.resolution.set(pr);
        Ok(())
    }

    /// Mean distance from each point to its nearest other point.
    pub fn resolution(&self) -> Result<f64> {
        if let Some(pr) = self.resolution.get() {
            return Ok(*pr);
        }
        let index = SpatialIndex::build(&self.points)?;
        let pr = compute_resolution_with(&self.points, &index)?;
        Ok(*self.resolution.get_or_init(|| pr))
    }

    pub fn build_index(&self) -> Result<SpatialIndex> {
        SpatialIndex::build(&self.points)
    }

    /// Point-wise map, dropping normals and the cached resolution.
    pub fn map_points(&self, f: impl Fn(&Vec3) -> Vec3) -> Result<PointCloud> {
        PointCloud::new(self.points.iter().map(f).collect())
    }

    /// Keep the points at `indices` (in the given order), carrying normals.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            normals: self
                .normals
                .as_ref()
                .map(|n| indices.iter().map(|&i| n[i]).collect()),
            resolution: OnceLock::new(),
        }
    }
}

/// Mean nearest-neighbor distance, using an existing index over `points`.
pub fn compute_resolution_with(points: &[Vec3], index: &SpatialIndex) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::invalid("resolution needs at least 2 points"));
    }
    let total: f64 = points.iter().map(|p| index.knn(p, 2)[1].1).sum();
    Ok(total / points.len() as f64)
}

/// Resolution of `cloud`, computing and caching it on first use.
pub fn compute_resolution(cloud: &PointCloud) -> Result<f64> {
    cloud.resolution()
}
