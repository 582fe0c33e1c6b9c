use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::index::SpatialIndex;
use crate::normals::{covariance, sorted_eigen};
use crate::Vec3;

pub const BOUNDARY_K: usize = 20;
pub const BOUNDARY_GAP_DEG: f64 = 90.0;

/// Largest angular gap (radians) between the tangent-plane directions from
/// `p` to its neighbors.
fn max_angular_gap(p: &Vec3, neighbors: &[Vec3]) -> f64 {
    let (_, cov) = covariance(neighbors.iter().chain(std::iter::once(p)));
    let (_, vecs) = sorted_eigen(cov);
    let n = vecs[0];
    let helper = if n.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let u = n.cross(&helper).normalize();
    let v = n.cross(&u);
    let mut angles: Vec<f64> = neighbors
        .iter()
        .map(|q| q - p)
        .filter(|d| d.norm_squared() > 0.0)
        .map(|d| d.dot(&v).atan2(d.dot(&u)))
        .collect();
    if angles.len() < 2 {
        return 2.0 * PI;
    }
    angles.sort_by(f64::total_cmp);
    let wrap = 2.0 * PI - (angles[angles.len() - 1] - angles[0]);
    angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max)
}

/// Flag points whose `k`-neighborhood leaves an angular gap above `gap_deg`
/// in the local tangent plane.
pub fn detect_boundary_with(
    cloud: &PointCloud,
    index: &SpatialIndex,
    k: usize,
    gap_deg: f64,
) -> Result<Vec<bool>> {
    if cloud.len() < k + 1 {
        return Err(Error::invalid(format!(
            "boundary detection with k = {k} needs at least {} points",
            k + 1
        )));
    }
    let pts = cloud.points();
    let threshold = gap_deg.to_radians();
    Ok((0..pts.len())
        .into_par_iter()
        .map(|i| {
            let neighbors: Vec<Vec3> = index
                .knn(&pts[i], k + 1)
                .into_iter()
                .filter(|&(j, _)| j != i)
                .take(k)
                .map(|(j, _)| pts[j])
                .collect();
            max_angular_gap(&pts[i], &neighbors) > threshold
        })
        .collect())
}

/// Boundary flags with the default neighborhood (20) and gap threshold (90°).
pub fn detect_boundary(cloud: &PointCloud, index: &SpatialIndex) -> Result<Vec<bool>> {
    detect_boundary_with(cloud, index, BOUNDARY_K, BOUNDARY_GAP_DEG)
}

/// Distance-to-boundary bucket: `[0.2·g·R, 0.2·(g+1)·R)` for `g < 5`, and `[R, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryGroup(pub u8);

impl BoundaryGroup {
    pub const COUNT: usize = 6;

    pub fn from_ratio(t: f64) -> Self {
        let edges = [0.2, 0.4, 0.6, 0.8, 1.0];
        BoundaryGroup(edges.iter().filter(|&&e| t >= e).count() as u8)
    }

    pub fn label(self) -> &'static str {
        [
            "[0,0.2R)",
            "[0.2R,0.4R)",
            "[0.4R,0.6R)",
            "[0.6R,0.8R)",
            "[0.8R,1.0R)",
            "[1.0R,inf)",
        ][self.0 as usize]
    }
}

impl fmt::Display for BoundaryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Distance from `keypoint` to the nearest boundary point and its bucket.
/// With no boundary points the distance is infinite.
pub fn distance_to_boundary(keypoint: &Vec3, boundary: &[Vec3], r: f64) -> (f64, BoundaryGroup) {
    let d = boundary
        .iter()
        .map(|b| (b - keypoint).norm())
        .fold(f64::INFINITY, f64::min);
    (d, BoundaryGroup::from_ratio(d / r))
}

/// Indexed boundary set for many distance queries.
#[derive(Debug, Clone)]
pub struct BoundaryMap {
    index: Option<SpatialIndex>,
    radius: f64,
}

impl BoundaryMap {
    pub fn new(cloud: &PointCloud, flags: &[bool], r: f64) -> Result<Self> {
        let pts: Vec<Vec3> = cloud
            .points()
            .iter()
            .zip(flags)
            .filter_map(|(p, f)| f.then_some(*p))
            .collect();
        let index = if pts.is_empty() {
            None
        } else {
            Some(SpatialIndex::build(&pts)?)
        };
        Ok(BoundaryMap { index, radius: r })
    }

    pub fn classify(&self, keypoint: &Vec3) -> (f64, BoundaryGroup) {
        let d = self
            .index
            .as_ref()
            .map_or(f64::INFINITY, |idx| idx.nearest(keypoint).1);
        (d, BoundaryGroup::from_ratio(d / self.radius))
    }
}
