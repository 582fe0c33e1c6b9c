use rayon::prelude::*;

use crate::cloud::PointCloud;
use crate::error::Result;
use crate::index::SpatialIndex;
use crate::transform::RigidTransform;
use crate::Vec3;

/// Dataset grouping used by the clutter, occlusion and overlap experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKey {
    Overlap,
    Clutter,
    Occlusion,
}

impl GroupKey {
    pub const ALL: [GroupKey; 3] = [GroupKey::Overlap, GroupKey::Clutter, GroupKey::Occlusion];

    pub fn name(self) -> &'static str {
        match self {
            GroupKey::Overlap => "overlap",
            GroupKey::Clutter => "clutter",
            GroupKey::Occlusion => "occlusion",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Bucket labels, lowest first. Overlap is a ratio, the others percent.
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            GroupKey::Overlap => &[
                "<0.3", "0.3-0.4", "0.4-0.5", "0.5-0.6", "0.6-0.7", "0.7-0.8", "0.8-0.9",
            ],
            GroupKey::Clutter => &["<65", "65-70", "70-75", "75-80", "80-85", "85-90", "90-95"],
            GroupKey::Occlusion => &["<60", "60-65", "65-70", "70-75", "75-80", "80-85", "85-90"],
        }
    }

    /// Bucket of a ratio in `[0, 1]`; `None` above the last bucket.
    pub fn bucket(self, value: f64) -> Option<&'static str> {
        let (first, step) = match self {
            GroupKey::Overlap => (0.3, 0.1),
            GroupKey::Clutter => (0.65, 0.05),
            GroupKey::Occlusion => (0.6, 0.05),
        };
        let labels = self.labels();
        // Edges are compared in hundredths to dodge binary rounding.
        let v = (value * 100.0 * 1e9).round() / 1e9;
        let (first, step) = (first * 100.0, step * 100.0);
        if v < first {
            return Some(labels[0]);
        }
        let i = 1 + ((v - first) / step).floor() as usize;
        labels.get(i).copied()
    }
}

/// Points of `points` that have a neighbor in `index` within `tol`.
fn count_covered(points: &[Vec3], index: &SpatialIndex, tol: f64) -> usize {
    points
        .par_iter()
        .filter(|p| index.nearest(p).1 <= tol)
        .count()
}

/// Default scene tolerance: twice the source resolution.
pub fn default_tolerance(source: &PointCloud) -> Result<f64> {
    Ok(2.0 * source.resolution()?)
}

/// Shared-point fraction of two views relative to the smaller one.
///
/// `tol` defaults to twice the source resolution.
pub fn compute_overlap(
    source: &PointCloud,
    target: &PointCloud,
    transform: &RigidTransform,
    tol: Option<f64>,
) -> Result<f64> {
    let tol = match tol {
        Some(t) => t,
        None => default_tolerance(source)?,
    };
    let moved: Vec<Vec3> = source.points().iter().map(|p| transform.apply(p)).collect();
    let covered = count_covered(&moved, &target.build_index()?, tol);
    Ok(covered as f64 / source.len().min(target.len()) as f64)
}

/// Clutter (fraction of the target not explained by the source) and
/// occlusion (fraction of the source missing from the target), with point
/// counts standing in for surface area.
pub fn compute_clutter_occlusion(
    source: &PointCloud,
    target: &PointCloud,
    transform: &RigidTransform,
    tol: Option<f64>,
) -> Result<(f64, f64)> {
    let tol = match tol {
        Some(t) => t,
        None => default_tolerance(source)?,
    };
    let moved: Vec<Vec3> = source.points().iter().map(|p| transform.apply(p)).collect();
    let source_index = SpatialIndex::build(&moved)?;
    let target_index = target.build_index()?;
    let explained = count_covered(target.points(), &source_index, tol);
    let present = count_covered(&moved, &target_index, tol);
    Ok((
        1.0 - explained as f64 / target.len() as f64,
        1.0 - present as f64 / source.len() as f64,
    ))
}
