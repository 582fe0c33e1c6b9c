use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::index::SpatialIndex;
use crate::lrf::Lrf;
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    World,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatchShape {
    /// Closed ball of radius `R` around the keypoint.
    Sphere,
    /// Axis-aligned cube (in the LRF) of half-edge `R` bounding the support
    /// sphere; only points of the sphere are kept.
    Cube,
}

/// Neighborhood of a keypoint, in world coordinates or in its LRF.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPatch {
    pub keypoint: Vec3,
    pub points: Vec<Vec3>,
    pub normals: Option<Vec<Vec3>>,
    /// Index of each patch point in the source cloud.
    pub indices: Vec<usize>,
    pub frame: Frame,
    pub shape: PatchShape,
    pub support_radius: f64,
}

/// Half-edge of the cube bounding a sphere of radius `r`.
pub fn cube_half_edge(r: f64) -> f64 {
    r
}

impl LocalPatch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Half-edge of the cubic crop for this patch's support radius.
    pub fn half_edge(&self) -> f64 {
        cube_half_edge(self.support_radius)
    }

    /// Keep only the points inside the bounding cube. The patch must be in
    /// the Local frame.
    pub fn crop_cube(&self) -> Result<LocalPatch> {
        if self.frame != Frame::Local {
            return Err(Error::invalid("cubic crop needs a local-frame patch"));
        }
        let h = self.half_edge();
        let keep: Vec<usize> = (0..self.points.len())
            .filter(|&i| self.points[i].amax() <= h)
            .collect();
        Ok(LocalPatch {
            keypoint: self.keypoint,
            points: keep.iter().map(|&i| self.points[i]).collect(),
            normals: self
                .normals
                .as_ref()
                .map(|n| keep.iter().map(|&i| n[i]).collect()),
            indices: keep.iter().map(|&i| self.indices[i]).collect(),
            frame: Frame::Local,
            shape: PatchShape::Cube,
            support_radius: self.support_radius,
        })
    }
}

/// All cloud points within `radius` of `keypoint`, world frame.
pub fn extract_spherical_patch(
    cloud: &PointCloud,
    index: &SpatialIndex,
    keypoint: &Vec3,
    radius: f64,
) -> Result<LocalPatch> {
    if !(radius > 0.0) {
        return Err(Error::invalid(format!(
            "support radius must be positive, got {radius}"
        )));
    }
    let indices = index.radius(keypoint, radius);
    if indices.is_empty() {
        return Err(Error::EmptyPatch);
    }
    let pts = cloud.points();
    Ok(LocalPatch {
        keypoint: *keypoint,
        points: indices.iter().map(|&i| pts[i]).collect(),
        normals: cloud
            .normals()
            .map(|n| indices.iter().map(|&i| n[i]).collect()),
        indices,
        frame: Frame::World,
        shape: PatchShape::Sphere,
        support_radius: radius,
    })
}

/// Points of the support sphere, voxelized later over the LRF-aligned cube
/// of half-edge `radius` centred on `keypoint`; returned in the Local frame.
pub fn extract_cubic_patch(
    cloud: &PointCloud,
    index: &SpatialIndex,
    keypoint: &Vec3,
    radius: f64,
    lrf: &Lrf,
) -> Result<LocalPatch> {
    let sphere = extract_spherical_patch(cloud, index, keypoint, radius)?;
    let cube = transform_to_lrf(&sphere, lrf)?.crop_cube()?;
    if cube.is_empty() {
        return Err(Error::EmptyPatch);
    }
    Ok(cube)
}

/// Express a world-frame patch in `lrf`, anchored at the patch keypoint.
///
/// Points map to `Bᵀ(q − keypoint)` and normals to `Bᵀ n`, where `B` holds the
/// frame axes as columns.
pub fn transform_to_lrf(patch: &LocalPatch, lrf: &Lrf) -> Result<LocalPatch> {
    if patch.frame != Frame::World {
        return Err(Error::invalid("patch is already in a local frame"));
    }
    let frame = lrf.with_origin(patch.keypoint);
    Ok(LocalPatch {
        keypoint: Vec3::zeros(),
        points: patch.points.iter().map(|q| frame.to_local(q)).collect(),
        normals: patch
            .normals
            .as_ref()
            .map(|ns| ns.iter().map(|n| frame.direction_to_local(n)).collect()),
        indices: patch.indices.clone(),
        frame: Frame::Local,
        shape: patch.shape,
        support_radius: patch.support_radius,
    })
}
