//! Local reference frames: construction, ground-truth propagation and
//! controlled angular perturbation.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3, Unit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::normals::{covariance, orient, sorted_eigen};
use crate::patch::{Frame, LocalPatch};
use crate::transform::RigidTransform;
use crate::Vec3;

const FRAME_TOL: f64 = 1e-6;

/// Orthonormal right-handed frame anchored at a keypoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lrf {
    pub origin: Vec3,
    pub x_axis: Vec3,
    pub y_axis: Vec3,
    pub z_axis: Vec3,
}

/// Which axes receive an injected angular error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerturbAxes {
    X,
    Z,
    XZ,
}

impl Lrf {
    /// Validated constructor; axes must be unit, orthogonal and right-handed within 1e-6.
    pub fn new(origin: Vec3, x_axis: Vec3, y_axis: Vec3, z_axis: Vec3) -> Result<Self> {
        let lrf = Lrf {
            origin,
            x_axis,
            y_axis,
            z_axis,
        };
        let err = lrf.frame_error();
        if !(err <= FRAME_TOL) {
            return Err(Error::Validation(format!(
                "axes are not an orthonormal right-handed frame (error {err:.3e})"
            )));
        }
        Ok(lrf)
    }

    /// World-aligned frame at `origin`.
    pub fn axis_aligned(origin: Vec3) -> Self {
        Lrf {
            origin,
            x_axis: Vec3::x(),
            y_axis: Vec3::y(),
            z_axis: Vec3::z(),
        }
    }

    /// Largest deviation from unit length, orthogonality and `x × y = z`.
    pub fn frame_error(&self) -> f64 {
        let axes = [self.x_axis, self.y_axis, self.z_axis];
        let unit = axes
            .iter()
            .map(|a| (a.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        let ortho = self
            .x_axis
            .dot(&self.y_axis)
            .abs()
            .max(self.y_axis.dot(&self.z_axis).abs())
            .max(self.x_axis.dot(&self.z_axis).abs());
        let hand = (self.x_axis.cross(&self.y_axis) - self.z_axis).amax();
        unit.max(ortho).max(hand)
    }

    /// Matrix with the axes as columns.
    pub fn basis(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.x_axis, self.y_axis, self.z_axis])
    }

    /// Coordinates of a world point in this frame.
    pub fn to_local(&self, q: &Vec3) -> Vec3 {
        let d = q - self.origin;
        // `+ 0.0` folds negative zeros so the keypoint maps to exactly (+0, +0, +0).
        Vec3::new(
            self.x_axis.dot(&d) + 0.0,
            self.y_axis.dot(&d) + 0.0,
            self.z_axis.dot(&d) + 0.0,
        )
    }

    pub fn direction_to_local(&self, v: &Vec3) -> Vec3 {
        Vec3::new(self.x_axis.dot(v), self.y_axis.dot(v), self.z_axis.dot(v))
    }

    pub fn to_world(&self, q: &Vec3) -> Vec3 {
        self.origin + self.x_axis * q.x + self.y_axis * q.y + self.z_axis * q.z
    }

    pub fn with_origin(mut self, origin: Vec3) -> Self {
        self.origin = origin;
        self
    }

    fn rotated(&self, rot: &Rotation3<f64>) -> Lrf {
        Lrf {
            origin: self.origin,
            x_axis: rot * self.x_axis,
            y_axis: rot * self.y_axis,
            z_axis: rot * self.z_axis,
        }
    }

    /// Gram–Schmidt keeping `z`, then `x`, with `y = z × x`.
    fn reorthonormalized(&self) -> Lrf {
        let z = self.z_axis.normalize();
        let x = (self.x_axis - z * self.x_axis.dot(&z)).normalize();
        Lrf {
            origin: self.origin,
            x_axis: x,
            y_axis: z.cross(&x),
            z_axis: z,
        }
    }
}

/// Deterministic covariance frame of a world-frame patch.
///
/// `z` is the smallest-eigenvalue direction and `x` the largest; each is
/// signed so that its summed projection of `q − keypoint` is non-negative;
/// `y = z × x`.
pub fn canonical_lrf(patch: &LocalPatch) -> Result<Lrf> {
    if patch.frame != Frame::World {
        return Err(Error::invalid("canonical_lrf expects a world-frame patch"));
    }
    if patch.points.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "{} points cannot define a frame",
            patch.points.len()
        )));
    }
    let (_, cov) = covariance(patch.points.iter());
    let (vals, vecs) = sorted_eigen(cov);
    if !(vals[1] > 1e-12 * vals[2].max(f64::MIN_POSITIVE)) || vals[2] <= 0.0 {
        return Err(Error::DegenerateGeometry(
            "patch points are collinear or coincident".into(),
        ));
    }
    let p = patch.keypoint;
    let spread: Vec3 = patch.points.iter().map(|q| q - p).sum();
    let z = orient(vecs[0], &spread);
    let x = orient(vecs[2], &spread);
    // Orthogonalize against z to absorb eigen-solver round-off.
    let x = (x - z * x.dot(&z)).normalize();
    Ok(Lrf {
        origin: p,
        x_axis: x,
        y_axis: z.cross(&x),
        z_axis: z,
    })
}

/// Carry a source frame through the ground-truth pose.
pub fn propagate_lrf(lrf: &Lrf, transform: &RigidTransform) -> Lrf {
    Lrf {
        origin: transform.apply(&lrf.origin),
        x_axis: transform.rotate(&lrf.x_axis),
        y_axis: transform.rotate(&lrf.y_axis),
        z_axis: transform.rotate(&lrf.z_axis),
    }
}

/// Tilt `axis` of `lrf` by `angle` radians toward a uniformly random
/// perpendicular direction, rotating the whole frame rigidly.
fn tilt<R: Rng>(lrf: &Lrf, which: usize, angle: f64, rng: &mut R) -> Lrf {
    let (a, b, c) = match which {
        0 => (lrf.x_axis, lrf.y_axis, lrf.z_axis),
        _ => (lrf.z_axis, lrf.x_axis, lrf.y_axis),
    };
    let psi = rng.random_range(0.0..2.0 * PI);
    let toward = b * psi.cos() + c * psi.sin();
    let axis = Unit::new_normalize(a.cross(&toward));
    lrf.rotated(&Rotation3::from_axis_angle(&axis, angle))
}

/// Perturbed frame plus the angles (degrees) applied to x and z.
pub fn perturb_lrf_detailed(
    lrf: &Lrf,
    angle_deg: f64,
    axes: PerturbAxes,
    seed: u64,
) -> Result<(Lrf, [f64; 2])> {
    if !(0.0..90.0).contains(&angle_deg) {
        return Err(Error::invalid(format!(
            "LRF error must lie in [0°, 90°), got {angle_deg}°"
        )));
    }
    if angle_deg == 0.0 {
        return Ok((*lrf, [0.0, 0.0]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let split = match axes {
        PerturbAxes::X => [angle_deg, 0.0],
        PerturbAxes::Z => [0.0, angle_deg],
        PerturbAxes::XZ => {
            let first = rng.random_range(0.0..=1.0) * angle_deg;
            [first, angle_deg - first]
        }
    };
    let mut out = *lrf;
    if split[0] > 0.0 {
        out = tilt(&out, 0, split[0].to_radians(), &mut rng);
    }
    if split[1] > 0.0 {
        out = tilt(&out, 2, split[1].to_radians(), &mut rng);
    }
    Ok((out.reorthonormalized(), split))
}

/// Inject an angular error of `angle_deg` into the x axis, z axis, or both
/// (split at random between them).
pub fn perturb_lrf(lrf: &Lrf, angle_deg: f64, axes: PerturbAxes, seed: u64) -> Result<Lrf> {
    perturb_lrf_detailed(lrf, angle_deg, axes, seed).map(|(l, _)| l)
}

/// Angle in degrees between two directions.
pub fn angle_between_deg(a: &Vec3, b: &Vec3) -> f64 {
    // atan2 form stays accurate for small angles.
    a.cross(b).norm().atan2(a.dot(b)).to_degrees()
}
