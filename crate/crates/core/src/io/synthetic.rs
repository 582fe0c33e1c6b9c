use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::transform::RigidTransform;
use crate::Vec3;

/// Smallest accepted synthetic point count.
pub const MIN_SYNTHETIC_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeKind {
    /// Closed sphere carrying random Gaussian bumps.
    BumpySphere,
    /// Open terrain patch with a boundary.
    Heightfield,
    /// Closed box-to-diamond family with random exponents and axes.
    Superellipsoid,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 3] = [
        ShapeKind::BumpySphere,
        ShapeKind::Heightfield,
        ShapeKind::Superellipsoid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::BumpySphere => "bumpy-sphere",
            ShapeKind::Heightfield => "heightfield",
            ShapeKind::Superellipsoid => "superellipsoid",
        }
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown shape `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SyntheticShapeSpec {
    pub kind: ShapeKind,
    pub points: usize,
    pub seed: u64,
    pub pose_seed: u64,
    /// Resolution the sampled cloud is scaled to.
    #[serde(default = "unit")]
    pub resolution: f64,
}

fn unit() -> f64 {
    1.0
}

impl SyntheticShapeSpec {
    pub fn new(kind: ShapeKind, points: usize, seed: u64, pose_seed: u64) -> Self {
        SyntheticShapeSpec {
            kind,
            points,
            seed,
            pose_seed,
            resolution: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < MIN_SYNTHETIC_POINTS {
            return Err(Error::invalid(format!(
                "synthetic shapes need at least {MIN_SYNTHETIC_POINTS} points, got {}",
                self.points
            )));
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::invalid(format!(
                "resolution must be positive, got {}",
                self.resolution
            )));
        }
        Ok(())
    }
}

struct Bump {
    center: Vec3,
    amplitude: f64,
    width: f64,
}

fn fibonacci_directions(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    let spacing = (4.0 * PI / n as f64).sqrt();
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            let d = Vec3::new(rho * phi.cos(), rho * phi.sin(), z);
            // Tangential jitter of a quarter spacing breaks the lattice.
            let jitter = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ) * (0.25 * spacing);
            (d + jitter - d * d.dot(&jitter)).normalize()
        })
        .collect()
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

fn bumpy_sphere(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec3> {
    // Bumps are sized in sample spacings so that the relief has detail at
    // the scale of a support region whatever the point count.
    let spacing = (4.0 * PI / n as f64).sqrt();
    let count = (n / 60).max(32);
    let bumps: Vec<Bump> = (0..count)
        .map(|_| Bump {
            center: random_unit(rng),
            amplitude: rng.random_range(-2.5..4.0) * spacing,
            width: rng.random_range(2.5..10.0) * spacing,
        })
        .collect();
    fibonacci_directions(n, rng)
        .into_iter()
        .map(|d| {
            let r: f64 = 1.0
                + bumps
                    .iter()
                    .map(|b| b.amplitude * (-(1.0 - d.dot(&b.center)) / (b.width * b.width)).exp())
                    .sum::<f64>();
            d * r
        })
        .collect()
}

fn heightfield(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec3> {
    let bumps: Vec<Bump> = (0..24)
        .map(|_| Bump {
            center: Vec3::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), 0.0),
            amplitude: rng.random_range(-0.08..0.12),
            width: rng.random_range(0.04..0.18),
        })
        .collect();
    let (fx, fy, ph) = (
        rng.random_range(1.0..3.0),
        rng.random_range(1.0..3.0),
        rng.random_range(0.0..2.0 * PI),
    );
    let nx = (n as f64).sqrt().ceil() as usize;
    let ny = n.div_ceil(nx);
    let mut out = Vec::with_capacity(n);
    for j in 0..ny {
        for i in 0..nx {
            if out.len() == n {
                break;
            }
            let x = (i as f64 + 0.5 + rng.random_range(-0.3..0.3)) / nx as f64;
            let y = (j as f64 + 0.5 + rng.random_range(-0.3..0.3)) / ny as f64;
            let p = Vec3::new(x, y, 0.0);
            let z: f64 = 0.03 * (2.0 * PI * (fx * x + fy * y) + ph).sin()
                + bumps
                    .iter()
                    .map(|b| {
                        b.amplitude
                            * (-(p - b.center).norm_squared() / (2.0 * b.width * b.width)).exp()
                    })
                    .sum::<f64>();
            out.push(Vec3::new(x, y, z));
        }
    }
    out
}

fn signed_pow(v: f64, e: f64) -> f64 {
    v.signum() * v.abs().powf(e)
}

fn superellipsoid(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec3> {
    let e1 = rng.random_range(0.4..1.6);
    let e2 = rng.random_range(0.4..1.6);
    let axes = Vec3::new(
        rng.random_range(0.7..1.3),
        rng.random_range(0.7..1.3),
        rng.random_range(0.7..1.3),
    );
    fibonacci_directions(n, rng)
        .into_iter()
        .map(|d| {
            let eta = d.z.clamp(-1.0, 1.0).asin();
            let omega = d.y.atan2(d.x);
            let ce = eta.cos();
            Vec3::new(
                axes.x * signed_pow(ce, e1) * signed_pow(omega.cos(), e2),
                axes.y * signed_pow(ce, e1) * signed_pow(omega.sin(), e2),
                axes.z * signed_pow(eta.sin(), e1),
            )
        })
        .collect()
}

/// Sample the procedural surface of `spec`, scaled so that its resolution
/// equals `spec.resolution`.
pub fn generate_shape(spec: &SyntheticShapeSpec) -> Result<PointCloud> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let raw = match spec.kind {
        ShapeKind::BumpySphere => bumpy_sphere(spec.points, &mut rng),
        ShapeKind::Heightfield => heightfield(spec.points, &mut rng),
        ShapeKind::Superellipsoid => superellipsoid(spec.points, &mut rng),
    };
    let raw = PointCloud::new(raw)?;
    let scale = spec.resolution / raw.resolution()?;
    let cloud = raw.map_points(|p| p * scale)?;
    Ok(cloud)
}

/// Source shape, a rigidly moved copy, and the pose mapping source onto target.
///
/// The rotation is uniform and the translation bounded by 50 resolutions per
/// axis.
pub fn generate_synthetic_pair(
    spec: &SyntheticShapeSpec,
) -> Result<(PointCloud, PointCloud, RigidTransform)> {
    let source = generate_shape(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.pose_seed);
    let transform = RigidTransform::random(&mut rng, 50.0 * spec.resolution);
    let target = source.map_points(|p| transform.apply(p))?;
    Ok((source, target, transform))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_is_controlled() {
        for kind in ShapeKind::ALL {
            let mut spec = SyntheticShapeSpec::new(kind, 800, 3, 4);
            spec.resolution = 0.5;
            let c = generate_shape(&spec).unwrap();
            assert_eq!(c.len(), 800);
            let pr = crate::cloud::compute_resolution(&c).unwrap();
            assert!((pr - 0.5).abs() < 0.05, "{kind}: {pr}");
        }
    }

    #[test]
    fn pair_is_an_exact_copy() {
        let spec = SyntheticShapeSpec::new(ShapeKind::BumpySphere, 500, 1, 2);
        let (s, t, x) = generate_synthetic_pair(&spec).unwrap();
        for (p, q) in s.points().iter().zip(t.points()) {
            assert!((x.apply(p) - q).norm() < 1e-12);
        }
        let (s2, t2, x2) = generate_synthetic_pair(&spec).unwrap();
        assert_eq!(s.points(), s2.points());
        assert_eq!(t.points(), t2.points());
        assert_eq!(x, x2);
    }

    #[test]
    fn too_few_points() {
        assert!(
            generate_shape(&SyntheticShapeSpec::new(ShapeKind::Heightfield, 99, 0, 0)).is_err()
        );
        assert_eq!(
            "heightfield".parse::<ShapeKind>().unwrap(),
            ShapeKind::Heightfield
        );
    }
}
