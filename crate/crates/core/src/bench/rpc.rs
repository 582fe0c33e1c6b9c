use crate::error::{Error, Result};

use super::matching::MatchCounts;

/// Default number of ratio thresholds.
pub const DEFAULT_TAU_STEPS: usize = 101;

/// `steps` uniform thresholds from 0 to 1 inclusive.
pub fn tau_grid(steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::invalid(format!(
            "a threshold grid needs at least 2 steps, got {steps}"
        )));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|i| i as f64 / last).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpcPoint {
    pub tau: f64,
    pub one_minus_precision: f64,
    pub recall: f64,
}

/// Recall versus 1-precision curve, one point per threshold that produced
/// at least one match, in threshold order.
#[derive(Debug, Clone, PartialEq)]
pub struct RpcCurve {
    pub points: Vec<RpcPoint>,
    pub auc: f64,
    /// No threshold produced a match; `auc` is 0.
    pub degenerate: bool,
}

impl RpcCurve {
    /// Best recall reachable with 1-precision at most `max_fpr`.
    pub fn recall_at(&self, max_fpr: f64) -> f64 {
        self.points
            .iter()
            .filter(|p| p.one_minus_precision <= max_fpr)
            .map(|p| p.recall)
            .fold(0.0, f64::max)
    }
}

pub fn compute_rpc(counts: &[MatchCounts]) -> Result<RpcCurve> {
    if counts.windows(2).any(|w| !(w[0].tau <= w[1].tau)) {
        return Err(Error::invalid("thresholds must be ascending"));
    }
    if let Some(c) = counts.iter().find(|c| !(0.0..=1.0).contains(&c.tau)) {
        return Err(Error::invalid(format!(
            "threshold {} outside [0, 1]",
            c.tau
        )));
    }
    let points: Vec<RpcPoint> = counts
        .iter()
        .filter_map(|c| {
            c.one_minus_precision().map(|fpr| RpcPoint {
                tau: c.tau,
                one_minus_precision: fpr,
                recall: c.recall(),
            })
        })
        .collect();
    if points.is_empty() {
        return Ok(RpcCurve {
            points,
            auc: 0.0,
            degenerate: true,
        });
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.one_minus_precision, p.recall))
        .collect();
    Ok(RpcCurve {
        auc: compute_auc(&xy),
        points,
        degenerate: false,
    })
}

/// Trapezoidal area under `(one_minus_precision, recall)` points.
///
/// Points are ordered by abscissa (then recall). Integration starts at the
/// leftmost point and the last point is held flat out to 1-precision = 1.
/// An empty curve has area 0.
pub fn compute_auc(points: &[(f64, f64)]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut area = 0.0;
    for w in pts.windows(2) {
        area += (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0;
    }
    let (x, y) = pts[pts.len() - 1];
    area += (1.0 - x).max(0.0) * y;
    area.clamp(0.0, 1.0)
}
