use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecimationMode {
    /// Strided selection along a Morton (Z-order) traversal.
    Uniform,
    /// Uniform sample without replacement.
    Random,
}

fn spread_bits(v: u64) -> u64 {
    let mut x = v & 0x1f_ffff;
    x = (x | x << 32) & 0x1f_0000_0000_ffff;
    x = (x | x << 16) & 0x1f_0000_ff00_00ff;
    x = (x | x << 8) & 0x100f_00f0_0f00_f00f;
    x = (x | x << 4) & 0x10c3_0c30_c30c_30c3;
    x = (x | x << 2) & 0x1249_2492_4924_9249;
    x
}

/// 63-bit Morton code of `p` quantized to 21 bits per axis inside `[lo, hi]`.
pub fn morton_code(p: &Vec3, lo: &Vec3, hi: &Vec3) -> u64 {
    let q = |a: usize| {
        let ext = hi[a] - lo[a];
        let t = if ext > 0.0 { (p[a] - lo[a]) / ext } else { 0.0 };
        (t.clamp(0.0, 1.0) * ((1u64 << 21) - 1) as f64) as u64
    };
    spread_bits(q(0)) | spread_bits(q(1)) << 1 | spread_bits(q(2)) << 2
}

/// Keep `round(rate · n)` points. Survivors keep their original relative
/// order; normals are carried.
pub fn decimate(
    cloud: &PointCloud,
    rate: f64,
    mode: DecimationMode,
    seed: u64,
) -> Result<PointCloud> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::invalid(format!(
            "decimation rate must lie in (0, 1], got {rate}"
        )));
    }
    let n = cloud.len();
    if rate == 1.0 {
        return Ok(cloud.clone());
    }
    let m = (rate * n as f64).round() as usize;
    if m < 2 {
        return Err(Error::DegenerateOutput(format!(
            "decimating {n} points at rate {rate} leaves {m}"
        )));
    }
    let mut keep: Vec<usize> = match mode {
        DecimationMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample(&mut rng, n, m).into_vec()
        }
        DecimationMode::Uniform => {
            let pts = cloud.points();
            let lo = pts
                .iter()
                .fold(Vec3::repeat(f64::INFINITY), |a, p| a.inf(p));
            let hi = pts
                .iter()
                .fold(Vec3::repeat(f64::NEG_INFINITY), |a, p| a.sup(p));
            let mut order: Vec<(u64, usize)> = pts
                .iter()
                .enumerate()
                .map(|(i, p)| (morton_code(p, &lo, &hi), i))
                .collect();
            order.sort_unstable();
            (0..m).map(|i| order[i * n / m].1).collect()
        }
    };
    keep.sort_unstable();
    Ok(cloud.select(&keep))
}
