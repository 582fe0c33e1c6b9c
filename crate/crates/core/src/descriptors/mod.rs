//! The nine local feature representations.
//!
//! Every descriptor consumes a patch already expressed in its local reference
//! frame (keypoint at the origin) and produces a fixed-length [`Feature`].
//! Histogram-style kinds (SHOT, USC, RoPS, TriSI) accumulate statistics over
//! spatial or geometric partitions; signature-style kinds (SGC, TOLDI, RCS,
//! LoVS, RSM) assign a value per voxel, grid cell or ray. LoVS and RSM are
//! binary and compared with the Hamming distance; the rest are real-valued
//! and compared with the Euclidean distance.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::patch::{Frame, LocalPatch, PatchShape};

mod bits;
pub mod dump;
mod lovs;
mod rcs;
mod rops;
mod rotation;
mod rsm;
mod sgc;
mod shot;
pub mod stats;
mod toldi;
mod trisi;
mod usc;

pub use bits::BitVector;
pub use lovs::describe_lovs;
pub use rcs::describe_rcs;
pub use rops::describe_rops;
pub use rotation::view_rotation;
pub use rsm::describe_rsm;
pub use sgc::{compress_centroid, describe_sgc};
pub use shot::describe_shot;
pub use toldi::describe_toldi;
pub use trisi::{describe_trisi, spin_coordinates};
pub use usc::{describe_usc, usc_bin_volume, usc_radial_edges, usc_weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DescriptorKind {
    Shot,
    Usc,
    Rops,
    Trisi,
    Sgc,
    Toldi,
    Rcs,
    Lovs,
    Rsm,
}

impl DescriptorKind {
    pub const ALL: [DescriptorKind; 9] = [
        DescriptorKind::Shot,
        DescriptorKind::Usc,
        DescriptorKind::Rops,
        DescriptorKind::Trisi,
        DescriptorKind::Sgc,
        DescriptorKind::Toldi,
        DescriptorKind::Rcs,
        DescriptorKind::Lovs,
        DescriptorKind::Rsm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DescriptorKind::Shot => "SHOT",
            DescriptorKind::Usc => "USC",
            DescriptorKind::Rops => "RoPS",
            DescriptorKind::Trisi => "TriSI",
            DescriptorKind::Sgc => "SGC",
            DescriptorKind::Toldi => "TOLDI",
            DescriptorKind::Rcs => "RCS",
            DescriptorKind::Lovs => "LoVS",
            DescriptorKind::Rsm => "RSM",
        }
    }

    /// Stable one-byte tag used by the feature dump format.
    pub fn tag(self) -> u8 {
        self as u8
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.get(tag as usize).copied()
    }

    pub fn is_binary(self) -> bool {
        matches!(self, DescriptorKind::Lovs | DescriptorKind::Rsm)
    }

    pub fn needs_normals(self) -> bool {
        self == DescriptorKind::Shot
    }

    pub fn uses_cube(self) -> bool {
        matches!(self, DescriptorKind::Sgc | DescriptorKind::Lovs)
    }

    /// Number of entries (reals or bits) under `params`.
    pub fn dimension(self, params: &DescriptorParams) -> usize {
        let p = params;
        match self {
            DescriptorKind::Shot => p.shot_divisions() * p.shot_bins,
            DescriptorKind::Usc => p.usc_elevation * p.usc_azimuth * p.usc_radial,
            DescriptorKind::Rops => p.rops_rotations * 3 * 3 * 5,
            DescriptorKind::Trisi => 3 * p.trisi_divisions * p.trisi_divisions,
            DescriptorKind::Sgc => 2 * p.sgc_divisions.pow(3),
            DescriptorKind::Toldi => 3 * p.toldi_divisions * p.toldi_divisions,
            DescriptorKind::Rcs => p.rcs_rotations * p.rcs_contours,
            DescriptorKind::Lovs => p.lovs_divisions.pow(3),
            DescriptorKind::Rsm => p.rsm_rotations * p.rsm_divisions * p.rsm_divisions,
        }
    }

    /// Serialized payload size: 4 bytes per real, or bits packed 8 per byte.
    pub fn payload_bytes(self, params: &DescriptorParams) -> usize {
        let d = self.dimension(params);
        if self.is_binary() {
            d.div_ceil(8)
        } else {
            4 * d
        }
    }
}

impl fmt::Display for DescriptorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DescriptorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| k.name().to_ascii_lowercase() == lower)
            .ok_or_else(|| Error::invalid(format!("unknown descriptor `{s}`")))
    }
}

/// Partition and rotation counts for every descriptor.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct DescriptorParams {
    pub shot_azimuth: usize,
    pub shot_elevation: usize,
    pub shot_radial: usize,
    pub shot_bins: usize,
    pub usc_elevation: usize,
    pub usc_azimuth: usize,
    pub usc_radial: usize,
    /// Points closer than this fraction of `R` are ignored.
    pub usc_min_radius_ratio: f64,
    /// Density sphere radius in multiples of the resolution.
    pub usc_density_radius_pr: f64,
    pub rops_rotations: usize,
    pub rops_divisions: usize,
    pub trisi_divisions: usize,
    pub sgc_divisions: usize,
    pub sgc_centroid_levels: usize,
    pub toldi_divisions: usize,
    pub rcs_rotations: usize,
    pub rcs_contours: usize,
    pub lovs_divisions: usize,
    pub rsm_rotations: usize,
    pub rsm_divisions: usize,
}

impl Default for DescriptorParams {
    fn default() -> Self {
        DescriptorParams {
            shot_azimuth: 8,
            shot_elevation: 2,
            shot_radial: 2,
            shot_bins: 11,
            usc_elevation: 12,
            usc_azimuth: 11,
            usc_radial: 15,
            usc_min_radius_ratio: 0.1,
            usc_density_radius_pr: 2.0,
            rops_rotations: 3,
            rops_divisions: 5,
            trisi_divisions: 15,
            sgc_divisions: 8,
            sgc_centroid_levels: 16,
            toldi_divisions: 20,
            rcs_rotations: 6,
            rcs_contours: 12,
            lovs_divisions: 9,
            rsm_rotations: 6,
            rsm_divisions: 11,
        }
    }
}

impl DescriptorParams {
    pub fn shot_divisions(&self) -> usize {
        self.shot_azimuth * self.shot_elevation * self.shot_radial
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("shot_azimuth", self.shot_azimuth),
            ("shot_elevation", self.shot_elevation),
            ("shot_radial", self.shot_radial),
            ("shot_bins", self.shot_bins),
            ("usc_elevation", self.usc_elevation),
            ("usc_azimuth", self.usc_azimuth),
            ("usc_radial", self.usc_radial),
            ("rops_rotations", self.rops_rotations),
            ("rops_divisions", self.rops_divisions),
            ("trisi_divisions", self.trisi_divisions),
            ("sgc_divisions", self.sgc_divisions),
            ("sgc_centroid_levels", self.sgc_centroid_levels),
            ("toldi_divisions", self.toldi_divisions),
            ("rcs_rotations", self.rcs_rotations),
            ("rcs_contours", self.rcs_contours),
            ("lovs_divisions", self.lovs_divisions),
            ("rsm_rotations", self.rsm_rotations),
            ("rsm_divisions", self.rsm_divisions),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::invalid(format!("{name} must be at least 1")));
        }
        if !(self.usc_min_radius_ratio > 0.0 && self.usc_min_radius_ratio < 1.0) {
            return Err(Error::invalid("usc_min_radius_ratio must lie in (0, 1)"));
        }
        if !(self.usc_density_radius_pr > 0.0) {
            return Err(Error::invalid("usc_density_radius_pr must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Real(Vec<f32>),
    Bits(BitVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub kind: DescriptorKind,
    pub payload: Payload,
}

impl Feature {
    pub fn real(kind: DescriptorKind, values: Vec<f64>) -> Self {
        Feature {
            kind,
            payload: Payload::Real(values.into_iter().map(|v| v as f32).collect()),
        }
    }

    pub fn bits(kind: DescriptorKind, bits: BitVector) -> Self {
        Feature {
            kind,
            payload: Payload::Bits(bits),
        }
    }

    /// All-zero feature of the right length.
    pub fn zeros(kind: DescriptorKind, params: &DescriptorParams) -> Self {
        let d = kind.dimension(params);
        if kind.is_binary() {
            Feature::bits(kind, BitVector::zeros(d))
        } else {
            Feature {
                kind,
                payload: Payload::Real(vec![0.0; d]),
            }
        }
    }

    pub fn len(&self) -> usize {
        match &self.payload {
            Payload::Real(v) => v.len(),
            Payload::Bits(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_real(&self) -> Option<&[f32]> {
        match &self.payload {
            Payload::Real(v) => Some(v),
            Payload::Bits(_) => None,
        }
    }

    pub fn as_bits(&self) -> Option<&BitVector> {
        match &self.payload {
            Payload::Bits(b) => Some(b),
            Payload::Real(_) => None,
        }
    }

    /// Size of the serialized payload in bytes.
    pub fn byte_size(&self) -> usize {
        match &self.payload {
            Payload::Real(v) => 4 * v.len(),
            Payload::Bits(b) => b.len().div_ceil(8),
        }
    }
}

/// Euclidean distance for real features, Hamming count for binary ones.
pub fn feature_distance(a: &Feature, b: &Feature) -> Result<f64> {
    if a.kind != b.kind {
        return Err(Error::invalid(format!(
            "cannot compare {} with {}",
            a.kind, b.kind
        )));
    }
    match (&a.payload, &b.payload) {
        (Payload::Real(x), Payload::Real(y)) if x.len() == y.len() => Ok(euclidean(x, y)),
        (Payload::Bits(x), Payload::Bits(y)) if x.len() == y.len() => Ok(x.hamming(y) as f64),
        _ => Err(Error::invalid("feature payloads differ in type or length")),
    }
}

pub(crate) fn euclidean(x: &[f32], y: &[f32]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = (*a - *b) as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Outcome of describing one patch.
#[derive(Debug, Clone, PartialEq)]
pub struct Described {
    pub feature: Feature,
    /// The patch was empty and the feature is the all-zero placeholder.
    pub empty: bool,
}

/// Describe a local-frame spherical patch with any kind, cropping the cube
/// for SGC and LoVS. `resolution` sets the USC density radius.
pub fn describe(
    kind: DescriptorKind,
    patch: &LocalPatch,
    params: &DescriptorParams,
    resolution: f64,
) -> Result<Described> {
    if patch.frame != Frame::Local {
        return Err(Error::invalid("descriptors need a local-frame patch"));
    }
    let cube;
    let input = if kind.uses_cube() && patch.shape == PatchShape::Sphere {
        cube = patch.crop_cube()?;
        &cube
    } else {
        patch
    };
    if input.is_empty() {
        return Ok(Described {
            feature: Feature::zeros(kind, params),
            empty: true,
        });
    }
    let feature = match kind {
        DescriptorKind::Shot => describe_shot(input, params)?,
        DescriptorKind::Usc => describe_usc(input, params, resolution)?,
        DescriptorKind::Rops => describe_rops(input, params)?,
        DescriptorKind::Trisi => describe_trisi(input, params)?,
        DescriptorKind::Sgc => describe_sgc(input, params)?,
        DescriptorKind::Toldi => describe_toldi(input, params)?,
        DescriptorKind::Rcs => describe_rcs(input, params)?,
        DescriptorKind::Lovs => describe_lovs(input, params)?,
        DescriptorKind::Rsm => describe_rsm(input, params)?,
    };
    Ok(Described {
        feature,
        empty: false,
    })
}

pub(crate) fn require_local(patch: &LocalPatch) -> Result<()> {
    if patch.frame != Frame::Local {
        return Err(Error::invalid("descriptors need a local-frame patch"));
    }
    Ok(())
}

/// Bin index of `value` in `[lo, hi)` split into `n` equal cells, clamped.
pub(crate) fn bin(value: f64, lo: f64, hi: f64, n: usize) -> usize {
    let t = ((value - lo) / (hi - lo) * n as f64).floor();
    if t <= 0.0 {
        0
    } else {
        (t as usize).min(n - 1)
    }
}
