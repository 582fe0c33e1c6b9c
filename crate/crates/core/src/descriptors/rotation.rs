use nalgebra::Matrix3;

use crate::Vec3;

pub(crate) fn about_x(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub(crate) fn about_y(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub(crate) fn about_z(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

pub(crate) fn about_axis(axis: usize, t: f64) -> Matrix3<f64> {
    match axis {
        0 => about_x(t),
        1 => about_y(t),
        _ => about_z(t),
    }
}

/// View `k` of the multi-view descriptors (RCS, RSM): the patch turned by
/// `k·π/(3·n_rot)` about x, then y, then z.
pub fn view_rotation(k: usize, n_rot: usize) -> Matrix3<f64> {
    let t = k as f64 * std::f64::consts::PI / (3.0 * n_rot as f64);
    about_z(t) * about_y(t) * about_x(t)
}

pub(crate) fn rotate_all(points: &[Vec3], r: &Matrix3<f64>) -> Vec<Vec3> {
    points.iter().map(|p| r * p).collect()
}
