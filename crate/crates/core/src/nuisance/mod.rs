//! Target-side corruptions and boundary classification.
//!
//! Every operation is a pure function of its inputs and seed: the input cloud
//! is never modified and the same seed always reproduces the same output.

mod boundary;
mod decimate;
mod keypoints;
mod noise;

use std::fmt;
use std::str::FromStr;

pub use boundary::{
    detect_boundary, detect_boundary_with, distance_to_boundary, BoundaryGroup, BoundaryMap,
    BOUNDARY_GAP_DEG, BOUNDARY_K,
};
pub use decimate::{decimate, morton_code, DecimationMode};
pub use keypoints::perturb_keypoints;
pub use noise::{add_gaussian_noise, add_shot_noise};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::lrf::PerturbAxes;

/// Shot-noise displacement as a fraction of the support radius.
pub const SHOT_NOISE_DISTANCE_RATIO: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NuisanceKind {
    /// Level: standard deviation in pr.
    GaussianNoise,
    /// Level: fraction of displaced points.
    ShotNoise,
    /// Level: kept fraction.
    DecimateUniform,
    /// Level: kept fraction.
    DecimateRandom,
    /// Level: localization error in pr.
    KeypointError,
    /// Level: angular error in degrees.
    LrfError(PerturbAxes),
}

impl NuisanceKind {
    pub const ALL: [NuisanceKind; 8] = [
        NuisanceKind::GaussianNoise,
        NuisanceKind::ShotNoise,
        NuisanceKind::DecimateUniform,
        NuisanceKind::DecimateRandom,
        NuisanceKind::KeypointError,
        NuisanceKind::LrfError(PerturbAxes::X),
        NuisanceKind::LrfError(PerturbAxes::Z),
        NuisanceKind::LrfError(PerturbAxes::XZ),
    ];

    pub fn label(self) -> &'static str {
        match self {
            NuisanceKind::GaussianNoise => "gaussian",
            NuisanceKind::ShotNoise => "shot",
            NuisanceKind::DecimateUniform => "decimate-uniform",
            NuisanceKind::DecimateRandom => "decimate-random",
            NuisanceKind::KeypointError => "keypoint",
            NuisanceKind::LrfError(PerturbAxes::X) => "lrf-x",
            NuisanceKind::LrfError(PerturbAxes::Z) => "lrf-z",
            NuisanceKind::LrfError(PerturbAxes::XZ) => "lrf-xz",
        }
    }

    /// Closed range of admissible levels.
    pub fn level_range(self) -> (f64, f64) {
        match self {
            NuisanceKind::GaussianNoise => (0.0, 2.0),
            NuisanceKind::ShotNoise => (0.0, 0.08),
            NuisanceKind::DecimateUniform | NuisanceKind::DecimateRandom => (1.0 / 32.0, 1.0),
            NuisanceKind::KeypointError => (0.0, 6.0),
            NuisanceKind::LrfError(_) => (0.0, 15.0),
        }
    }

    /// The level sweep used in the robustness experiments.
    pub fn standard_levels(self) -> Vec<f64> {
        match self {
            NuisanceKind::GaussianNoise => (1..=8).map(|i| 0.25 * i as f64).collect(),
            NuisanceKind::ShotNoise => (1..=8).map(|i| 0.01 * i as f64).collect(),
            NuisanceKind::DecimateUniform | NuisanceKind::DecimateRandom => {
                (1..=5).map(|i| 1.0 / (1u32 << i) as f64).collect()
            }
            NuisanceKind::KeypointError => (1..=6).map(|i| i as f64).collect(),
            NuisanceKind::LrfError(_) => (1..=6).map(|i| 2.5 * i as f64).collect(),
        }
    }

    /// Level that leaves the data untouched.
    pub fn identity_level(self) -> f64 {
        match self {
            NuisanceKind::DecimateUniform | NuisanceKind::DecimateRandom => 1.0,
            _ => 0.0,
        }
    }
}

impl fmt::Display for NuisanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NuisanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.label() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::invalid(format!("unknown nuisance `{s}`")))
    }
}

/// One corruption at one level with its own seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuisanceSpec {
    pub kind: NuisanceKind,
    pub level: f64,
    pub seed: u64,
}

impl NuisanceSpec {
    pub fn new(kind: NuisanceKind, level: f64, seed: u64) -> Result<Self> {
        let (lo, hi) = kind.level_range();
        if !(level >= lo - 1e-12 && level <= hi + 1e-12) {
            return Err(Error::invalid(format!(
                "{kind} level {level} is outside [{lo}, {hi}]"
            )));
        }
        Ok(NuisanceSpec { kind, level, seed })
    }

    /// Parse `kind=level`, e.g. `gaussian=0.5` or `decimate-random=1/8`.
    pub fn parse(text: &str, seed: u64) -> Result<Self> {
        let (kind, level) = text
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("expected kind=level, got `{text}`")))?;
        let kind: NuisanceKind = kind.trim().parse()?;
        let level = parse_level(level.trim())?;
        Self::new(kind, level, seed)
    }

    pub fn is_identity(&self) -> bool {
        self.level == self.kind.identity_level()
    }
}

/// Apply a cloud-level nuisance. `resolution` converts noise levels from pr
/// and `support_radius` fixes the shot-noise distance. Keypoint and LRF
/// errors act on frames rather than clouds and give `None`, as does an
/// identity level.
pub fn perturb_cloud(
    cloud: &PointCloud,
    spec: &NuisanceSpec,
    resolution: f64,
    support_radius: f64,
) -> Result<Option<PointCloud>> {
    if spec.is_identity() {
        return Ok(None);
    }
    let (level, seed) = (spec.level, spec.seed);
    Ok(Some(match spec.kind {
        NuisanceKind::GaussianNoise => add_gaussian_noise(cloud, level, resolution, seed)?,
        NuisanceKind::ShotNoise => add_shot_noise(
            cloud,
            level,
            SHOT_NOISE_DISTANCE_RATIO * support_radius,
            seed,
        )?,
        NuisanceKind::DecimateUniform => decimate(cloud, level, DecimationMode::Uniform, seed)?,
        NuisanceKind::DecimateRandom => decimate(cloud, level, DecimationMode::Random, seed)?,
        NuisanceKind::KeypointError | NuisanceKind::LrfError(_) => return Ok(None),
    }))
}

/// Accepts decimals, percentages (`3%`) and fractions (`1/8`).
pub fn parse_level(s: &str) -> Result<f64> {
    let bad = || Error::invalid(format!("cannot parse level `{s}`"));
    if let Some(p) = s.strip_suffix('%') {
        return p
            .trim()
            .parse::<f64>()
            .map(|v| v / 100.0)
            .map_err(|_| bad());
    }
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        return if b != 0.0 { Ok(a / b) } else { Err(bad()) };
    }
    s.parse().map_err(|_| bad())
}
