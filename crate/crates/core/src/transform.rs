use nalgebra::{Matrix3, Matrix4, Unit, UnitQuaternion, Vector4};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::Vec3;

/// Rigid motion `x ↦ R·x + t` with `R` a proper rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    rotation: Matrix3<f64>,
    translation: Vec3,
}

/// Largest entry of `RᵀR − I`, plus `|det R − 1|`.
pub fn orthonormality_error(r: &Matrix3<f64>) -> f64 {
    let gram = r.transpose() * r - Matrix3::identity();
    gram.amax().max((r.determinant() - 1.0).abs())
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: Matrix3::identity(),
            translation: Vec3::zeros(),
        }
    }

    /// Build from a rotation that must be orthonormal with det = +1 within 1e-9.
    pub fn new(rotation: Matrix3<f64>, translation: Vec3) -> Result<Self> {
        let err = orthonormality_error(&rotation);
        if !(err <= 1e-9) {
            return Err(Error::Validation(format!(
                "rotation is not a proper orthonormal matrix (error {err:.3e})"
            )));
        }
        if !translation.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("translation is not finite"));
        }
        Ok(RigidTransform {
            rotation,
            translation,
        })
    }

    pub fn from_rotation_axis_angle(axis: &Vec3, angle: f64, translation: Vec3) -> Self {
        let rot = UnitQuaternion::from_axis_angle(&Unit::new_normalize(*axis), angle);
        RigidTransform {
            rotation: rot.to_rotation_matrix().into_inner(),
            translation,
        }
    }

    /// Uniformly distributed rotation with translation drawn per-axis from
    /// `[−max_translation, max_translation]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_translation: f64) -> Self {
        // Normalized 4D Gaussian gives a uniform unit quaternion.
        let q = loop {
            let v = Vector4::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            );
            if v.norm() > 1e-9 {
                break v.normalize();
            }
        };
        let quat =
            UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(q[0], q[1], q[2], q[3]));
        let t = Vec3::from_fn(|_, _| rng.random_range(-max_translation..=max_translation));
        RigidTransform {
            rotation: quat.to_rotation_matrix().into_inner(),
            translation: t,
        }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vec3 {
        &self.translation
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        RigidTransform {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidTransform) -> Self {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn to_matrix4(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }
}
