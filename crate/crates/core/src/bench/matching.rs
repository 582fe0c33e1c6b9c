use rayon::prelude::*;

use crate::descriptors::{feature_distance, Feature};
use crate::error::{Error, Result};
use crate::Vec3;

/// Nearest and second-nearest target features of one source feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestPair {
    pub best: usize,
    pub d1: f64,
    pub d2: f64,
}

impl NearestPair {
    /// Ratio test at threshold `tau`. At `tau >= 1` every feature with a
    /// non-zero second distance matches.
    pub fn accepts(&self, tau: f64) -> bool {
        self.d2 > 0.0 && (tau >= 1.0 || self.d1 < tau * self.d2)
    }
}

/// Match statistics at one ratio threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchCounts {
    pub tau: f64,
    pub n_corr: usize,
    pub n_match: usize,
    pub n_correct: usize,
}

impl MatchCounts {
    pub fn recall(&self) -> f64 {
        if self.n_corr == 0 {
            0.0
        } else {
            self.n_correct as f64 / self.n_corr as f64
        }
    }

    /// `None` when nothing matched.
    pub fn one_minus_precision(&self) -> Option<f64> {
        (self.n_match > 0).then(|| 1.0 - self.n_correct as f64 / self.n_match as f64)
    }

    /// Add another instance's counts at the same threshold.
    pub fn merge(&mut self, other: &MatchCounts) {
        self.n_corr += other.n_corr;
        self.n_match += other.n_match;
        self.n_correct += other.n_correct;
    }
}

/// For every source feature, the two closest target features (lowest index
/// wins ties).
pub fn nearest_two(source: &[Feature], target: &[Feature]) -> Result<Vec<NearestPair>> {
    if target.len() < 2 {
        return Err(Error::invalid(format!(
            "matching needs at least 2 target features, got {}",
            target.len()
        )));
    }
    let kind = target[0].kind;
    if let Some(f) = source.iter().chain(target).find(|f| f.kind != kind) {
        return Err(Error::invalid(format!(
            "mixed feature kinds {} and {}",
            kind, f.kind
        )));
    }
    source
        .par_iter()
        .map(|s| {
            let mut best = (f64::INFINITY, usize::MAX);
            let mut second = f64::INFINITY;
            for (j, t) in target.iter().enumerate() {
                let d = feature_distance(s, t)?;
                if d < best.0 {
                    second = best.0;
                    best = (d, j);
                } else if d < second {
                    second = d;
                }
            }
            Ok(NearestPair {
                best: best.1,
                d1: best.0,
                d2: second,
            })
        })
        .collect()
}

/// Ratio-test matching over a threshold grid.
///
/// Source feature `i` and target feature `i` describe the two ends of
/// correspondence `i`, located at `target_positions[i]` in the target. A match
/// of `i` to `j` is correct when `j == i` or the two target keypoints lie
/// within `inlier_radius` of each other.
pub fn match_features(
    source: &[Feature],
    target: &[Feature],
    target_positions: &[Vec3],
    inlier_radius: f64,
    tau_grid: &[f64],
) -> Result<Vec<MatchCounts>> {
    if source.len() != target.len() || target.len() != target_positions.len() {
        return Err(Error::invalid(format!(
            "{} source features, {} target features and {} positions do not line up",
            source.len(),
            target.len(),
            target_positions.len()
        )));
    }
    let nn = nearest_two(source, target)?;
    Ok(count_matches(
        &nn,
        target_positions,
        inlier_radius,
        tau_grid,
    ))
}

/// Per-threshold counts from precomputed nearest pairs.
pub fn count_matches(
    nn: &[NearestPair],
    target_positions: &[Vec3],
    inlier_radius: f64,
    tau_grid: &[f64],
) -> Vec<MatchCounts> {
    let correct: Vec<bool> = nn
        .iter()
        .enumerate()
        .map(|(i, m)| {
            m.best == i || (target_positions[m.best] - target_positions[i]).norm() <= inlier_radius
        })
        .collect();
    tau_grid
        .iter()
        .map(|&tau| {
            let mut c = MatchCounts {
                tau,
                n_corr: nn.len(),
                n_match: 0,
                n_correct: 0,
            };
            for (m, ok) in nn.iter().zip(&correct) {
                if m.accepts(tau) {
                    c.n_match += 1;
                    c.n_correct += *ok as usize;
                }
            }
            c
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptors::DescriptorKind;

    fn feats(values: &[f64]) -> Vec<Feature> {
        values
            .iter()
            .map(|v| Feature::real(DescriptorKind::Rcs, vec![*v; 72]))
            .collect()
    }

    #[test]
    fn identical_features_match_perfectly() {
        let f = feats(&[0.0, 1.0, 2.5, 4.0]);
        let pos: Vec<Vec3> = (0..4)
            .map(|i| Vec3::new(10.0 * i as f64, 0.0, 0.0))
            .collect();
        let counts = match_features(&f, &f, &pos, 1.0, &[0.0, 0.99]).unwrap();
        assert_eq!(counts[0].n_match, 0);
        assert_eq!(counts[0].recall(), 0.0);
        assert_eq!(counts[1].n_correct, 4);
        assert_eq!(counts[1].recall(), 1.0);
        assert_eq!(counts[1].one_minus_precision(), Some(0.0));
    }

    #[test]
    fn eq_arithmetic() {
        let c = MatchCounts {
            tau: 0.5,
            n_corr: 100,
            n_match: 50,
            n_correct: 40,
        };
        assert!((c.recall() - 0.4).abs() < 1e-15);
        assert!((c.one_minus_precision().unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn unit_tau_matches_all_with_positive_second_distance() {
        let src = feats(&[0.0, 1.0, 3.0]);
        let tgt = feats(&[0.5, 0.5, 7.0]);
        let nn = nearest_two(&src, &tgt).unwrap();
        let pos = vec![Vec3::zeros(); 3];
        let c = count_matches(&nn, &pos, 0.0, &[1.0]);
        assert_eq!(c[0].n_match, nn.iter().filter(|m| m.d2 > 0.0).count());
        assert_eq!(c[0].n_match, 3);
    }

    #[test]
    fn rejects_bad_inputs() {
        let one = feats(&[1.0]);
        assert!(nearest_two(&one, &one).is_err());
        let mixed = vec![
            Feature::real(DescriptorKind::Rcs, vec![0.0; 72]),
            Feature::real(DescriptorKind::Rops, vec![0.0; 135]),
        ];
        assert!(nearest_two(&mixed[..1], &mixed).is_err());
    }
}
