//! Local geometric feature representations for 3D point clouds, and the
//! harness that measures how well they match under controlled nuisances.
//!
//! The crate is organized bottom-up:
//!
//! * [`cloud`], [`index`], [`normals`], [`lrf`], [`patch`], [`transform`]:
//!   point-cloud primitives shared by everything else.
//! * [`descriptors`]: the nine feature representations and feature distances.
//! * [`nuisance`]: target-side corruptions (noise, outliers, decimation,
//!   keypoint and LRF errors) and boundary classification.
//! * [`bench`]: correspondence sampling, ratio-test matching, recall versus
//!   1-precision curves, scene statistics, timing, and the benchmark runner.
//! * [`io`]: PLY, poses, synthetic shapes, manifests and report files.

pub mod bench;
pub mod cloud;
pub mod descriptors;
pub mod error;
pub mod index;
pub mod io;
pub mod lrf;
pub mod normals;
pub mod nuisance;
pub mod patch;
pub mod transform;

pub use cloud::{compute_resolution, PointCloud};
pub use descriptors::{describe, feature_distance, DescriptorKind, DescriptorParams, Feature};
pub use error::{Error, Result};
pub use index::SpatialIndex;
pub use lrf::{canonical_lrf, perturb_lrf, propagate_lrf, Lrf, PerturbAxes};
pub use normals::estimate_normals;
pub use patch::{
    extract_cubic_patch, extract_spherical_patch, transform_to_lrf, Frame, LocalPatch,
};
pub use transform::RigidTransform;

pub type Vec3 = nalgebra::Vector3<f64>;

/// Default support radius, in multiples of the resolution.
pub const DEFAULT_SUPPORT_RADIUS_PR: f64 = 15.0;
