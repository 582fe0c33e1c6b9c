use std::path::Path;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::transform::{orthonormality_error, RigidTransform};
use crate::Vec3;

/// Rotation drift tolerated without comment.
const QUIET_DRIFT: f64 = 1e-6;
/// Rotation drift beyond which a pose is rejected.
const MAX_DRIFT: f64 = 1e-4;

/// Parse a 4×4 row-major rigid matrix written as 16 whitespace-separated numbers.
///
/// Rotation blocks that drift from orthonormality by at most 1e-4 are
/// replaced by their polar factor; drift beyond 1e-6 is logged.
pub fn parse_pose(text: &str) -> Result<RigidTransform> {
    let mut values = Vec::with_capacity(16);
    let mut offset = 0usize;
    for token in text.split_inclusive(char::is_whitespace) {
        let t = token.trim();
        if !t.is_empty() {
            let v: f64 = t
                .parse()
                .map_err(|_| Error::parse(offset as u64, format!("bad number `{t}`")))?;
            if !v.is_finite() {
                return Err(Error::parse(
                    offset as u64,
                    format!("non-finite value `{t}`"),
                ));
            }
            values.push(v);
        }
        offset += token.len();
    }
    if values.len() != 16 {
        return Err(Error::parse(
            offset as u64,
            format!("a pose needs 16 numbers, found {}", values.len()),
        ));
    }
    let m = |r: usize, c: usize| values[4 * r + c];
    let last = [m(3, 0), m(3, 1), m(3, 2), m(3, 3)];
    if last
        .iter()
        .zip([0.0, 0.0, 0.0, 1.0])
        .any(|(a, b)| (a - b).abs() > 1e-9)
    {
        return Err(Error::Validation(format!(
            "last pose row is {last:?}, expected [0, 0, 0, 1]"
        )));
    }
    let rotation = Matrix3::from_fn(|r, c| m(r, c));
    let translation = Vec3::new(m(0, 3), m(1, 3), m(2, 3));
    let drift = orthonormality_error(&rotation);
    if !(drift <= MAX_DRIFT) {
        return Err(Error::Validation(format!(
            "rotation block is not rigid (drift {drift:.3e})"
        )));
    }
    if drift > QUIET_DRIFT {
        log::warn!("re-orthonormalizing pose rotation with drift {drift:.3e}");
    }
    RigidTransform::new(polar_rotation(&rotation)?, translation)
}

/// Nearest rotation to `m` in the Frobenius sense.
fn polar_rotation(m: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let r = u * vt;
    if r.determinant() < 0.0 {
        return Err(Error::Validation("rotation block is a reflection".into()));
    }
    Ok(r)
}

pub fn read_pose(path: &Path) -> Result<RigidTransform> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pose(&text).map_err(|e| match e {
        Error::Parse { offset, message } => Error::Parse {
            offset,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// Four lines of four numbers, shortest round-trip formatting.
pub fn format_pose(t: &RigidTransform) -> String {
    let m = t.to_matrix4();
    (0..4)
        .map(|r| {
            let row: Vec<String> = (0..4).map(|c| format!("{:?}", m[(r, c)])).collect();
            row.join(" ") + "\n"
        })
        .collect()
}

pub fn write_pose(t: &RigidTransform, path: &Path) -> Result<()> {
    std::fs::write(path, format_pose(t)).map_err(|e| Error::io(path, e))
}
