use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

use super::scene::GroupKey;
use crate::cloud::PointCloud;
use crate::descriptors::{describe, DescriptorKind, DescriptorParams, Feature};
use crate::error::{Error, Result};
use crate::index::SpatialIndex;
use crate::lrf::{canonical_lrf, perturb_lrf, propagate_lrf, Lrf};
use crate::normals::{estimate_normals_with, DEFAULT_NORMAL_K};
use crate::nuisance::{parse_level, perturb_cloud, perturb_keypoints, NuisanceKind, NuisanceSpec};
use crate::patch::{extract_spherical_patch, transform_to_lrf};
use crate::transform::RigidTransform;
use crate::{Vec3, DEFAULT_SUPPORT_RADIUS_PR};

use super::correspondence::{correspondences_for, sample_keypoints, CorrespondenceSet};
use super::matching::{match_features, MatchCounts};
use super::rpc::{compute_rpc, tau_grid, RpcCurve, DEFAULT_TAU_STEPS};

/// A loaded source/target pair with its ground-truth pose.
#[derive(Debug, Clone)]
pub struct BenchPair {
    pub name: String,
    pub source: PointCloud,
    pub target: PointCloud,
    /// Maps source coordinates onto the target.
    pub transform: RigidTransform,
    /// Group labels such as `overlap` or `clutter` buckets.
    pub labels: BTreeMap<String, String>,
}

/// One column of the experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Baseline,
    Nuisance {
        kind: NuisanceKind,
        level: f64,
    },
    /// Support radius in pr, applied to both sides.
    SupportRadius(f64),
    /// Clean matching restricted to pairs carrying `key = value`.
    Group {
        key: String,
        value: String,
    },
}

impl Condition {
    pub fn nuisance(kind: NuisanceKind, level: f64) -> Result<Self> {
        NuisanceSpec::new(kind, level, 0)?;
        Ok(Condition::Nuisance { kind, level })
    }

    /// The standard level sweep of `kind`.
    pub fn sweep(kind: NuisanceKind) -> Vec<Condition> {
        kind.standard_levels()
            .into_iter()
            .map(|level| Condition::Nuisance { kind, level })
            .collect()
    }

    /// Support radii 5 to 30 pr in steps of 5.
    pub fn radius_sweep() -> Vec<Condition> {
        (1..=6)
            .map(|i| Condition::SupportRadius(5.0 * i as f64))
            .collect()
    }

    pub fn label(&self) -> String {
        match self {
            Condition::Baseline => "baseline".into(),
            Condition::Nuisance { kind, .. } => kind.label().into(),
            Condition::SupportRadius(_) => "support-radius".into(),
            Condition::Group { key, value } => format!("group:{key}={value}"),
        }
    }

    pub fn level(&self) -> Option<f64> {
        match self {
            Condition::Nuisance { level, .. } => Some(*level),
            Condition::SupportRadius(r) => Some(*r),
            _ => None,
        }
    }

    /// Inverse of `label` + `level`.
    pub fn from_label(label: &str, level: Option<f64>) -> Result<Self> {
        match (label, level) {
            ("baseline", None) => Ok(Condition::Baseline),
            ("support-radius", Some(r)) => Ok(Condition::SupportRadius(r)),
            (l, None) if l.starts_with("group:") => {
                let (key, value) = l["group:".len()..]
                    .split_once('=')
                    .ok_or_else(|| Error::invalid(format!("malformed group condition `{l}`")))?;
                Ok(Condition::Group {
                    key: key.into(),
                    value: value.into(),
                })
            }
            (l, Some(level)) => Ok(Condition::Nuisance {
                kind: l.parse()?,
                level,
            }),
            (l, None) => Err(Error::invalid(format!("condition `{l}` needs a level"))),
        }
    }
}

/// Parse one condition or sweep: `baseline`, `gaussian=0.5`, `gaussian`
/// (its standard sweep), `support-radius=20`, `support-radius` (5 to 30 pr),
/// `group:overlap=0.5-0.6` or `group:overlap` (every bucket).
pub fn parse_conditions(text: &str) -> Result<Vec<Condition>> {
    let text = text.trim();
    if text == "baseline" {
        return Ok(vec![Condition::Baseline]);
    }
    if let Some(rest) = text.strip_prefix("group:") {
        return match rest.split_once('=') {
            Some((key, value)) => {
                let g = GroupKey::from_name(key)
                    .ok_or_else(|| Error::invalid(format!("unknown group `{key}`")))?;
                if !g.labels().contains(&value) {
                    return Err(Error::invalid(format!("`{value}` is not a {key} bucket")));
                }
                Ok(vec![Condition::Group {
                    key: key.into(),
                    value: value.into(),
                }])
            }
            None => {
                let g = GroupKey::from_name(rest)
                    .ok_or_else(|| Error::invalid(format!("unknown group `{rest}`")))?;
                Ok(g.labels()
                    .iter()
                    .map(|v| Condition::Group {
                        key: rest.into(),
                        value: (*v).into(),
                    })
                    .collect())
            }
        };
    }
    match text.split_once('=') {
        Some(("support-radius", r)) => {
            let r = parse_level(r.trim())?;
            if !(r > 0.0) {
                return Err(Error::invalid(format!(
                    "support radius must be positive, got {r}"
                )));
            }
            Ok(vec![Condition::SupportRadius(r)])
        }
        Some(_) => {
            let spec = NuisanceSpec::parse(text, 0)?;
            Ok(vec![Condition::Nuisance {
                kind: spec.kind,
                level: spec.level,
            }])
        }
        None if text == "support-radius" => Ok(Condition::radius_sweep()),
        None => Ok(Condition::sweep(text.parse()?)),
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level() {
            Some(l) => write!(f, "{}={}", self.label(), l),
            None => f.write_str(&self.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub seed: u64,
    pub n_keypoints: usize,
    pub tau_steps: usize,
    pub radius_pr: f64,
    /// Correspondence and match-correctness tolerance in pr.
    pub inlier_radius_pr: f64,
    /// Independent nuisance realizations per pair.
    pub repeats: usize,
    pub normal_k: usize,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub params: DescriptorParams,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            seed: 0,
            n_keypoints: 1000,
            tau_steps: DEFAULT_TAU_STEPS,
            radius_pr: DEFAULT_SUPPORT_RADIUS_PR,
            inlier_radius_pr: 2.0,
            repeats: 1,
            normal_k: DEFAULT_NORMAL_K,
            jobs: None,
            params: DescriptorParams::default(),
        }
    }
}

impl BenchOptions {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_keypoints == 0 || self.repeats == 0 || self.normal_k < 3 {
            return Err(Error::invalid(
                "keypoints and repeats must be positive and the normal neighborhood at least 3",
            ));
        }
        if !(self.radius_pr > 0.0 && self.inlier_radius_pr >= 0.0) {
            return Err(Error::invalid("support and inlier radii must be positive"));
        }
        if self.jobs == Some(0) {
            return Err(Error::invalid("jobs must be at least 1"));
        }
        tau_grid(self.tau_steps).map(|_| ())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    splitmix(splitmix(seed) ^ salt)
}

/// Keypoint-sampling seed of a pair; shared by every condition and repeat.
pub fn keypoint_seed(seed: u64, pair: usize) -> u64 {
    mix_seed(seed, pair as u64)
}

/// Nuisance seed of one pair and repeat; shared by every level so that a
/// sweep scales a single realization.
pub fn nuisance_seed(seed: u64, pair: usize, repeat: usize) -> u64 {
    mix_seed(keypoint_seed(seed, pair), 1 + repeat as u64)
}

/// Seed of the LRF perturbation at one source keypoint.
pub fn lrf_seed(nuisance_seed: u64, source_keypoint: usize) -> u64 {
    mix_seed(nuisance_seed, source_keypoint as u64)
}

/// Matching outcome of one descriptor on one pair run.
#[derive(Debug, Clone, PartialEq)]
pub struct KindRun {
    pub counts: Vec<MatchCounts>,
    pub curve: RpcCurve,
    /// Summed target-side extraction time.
    pub extract_ms: f64,
    pub features: usize,
}

/// One pair under one condition and repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRun {
    pub correspondences: usize,
    pub short: bool,
    /// Indexed like the requested kinds.
    pub kinds: Vec<KindRun>,
}

/// Source-side cache at one support radius.
struct SourceSide {
    keypoints: Vec<usize>,
    lrfs: Vec<Lrf>,
    /// `[kind][keypoint]`
    features: Vec<Vec<Feature>>,
}

/// Per-pair state shared across conditions.
pub struct PreparedPair<'a> {
    pair: &'a BenchPair,
    pair_index: usize,
    pr: f64,
    source: PointCloud,
    source_index: SpatialIndex,
    target: PointCloud,
    target_index: SpatialIndex,
    sampled: Vec<usize>,
    sides: BTreeMap<u64, SourceSide>,
}

fn with_normals(cloud: &PointCloud, index: &SpatialIndex, k: usize) -> Result<PointCloud> {
    if cloud.normals().is_some() {
        return Ok(cloud.clone());
    }
    Ok(estimate_normals_with(cloud, index, k)?.cloud)
}

/// Local-frame features of every kind at one keypoint, plus per-kind times.
fn describe_all(
    cloud: &PointCloud,
    index: &SpatialIndex,
    keypoint: &Vec3,
    lrf: &Lrf,
    radius: f64,
    resolution: f64,
    kinds: &[DescriptorKind],
    params: &DescriptorParams,
) -> Result<Vec<(Feature, f64)>> {
    let world = extract_spherical_patch(cloud, index, keypoint, radius);
    let local = match world {
        Ok(w) => Some(transform_to_lrf(&w, lrf)?),
        Err(Error::EmptyPatch) => None,
        Err(e) => return Err(e),
    };
    kinds
        .iter()
        .map(|&kind| {
            let start = Instant::now();
            let f = match &local {
                Some(p) => describe(kind, p, params, resolution)?.feature,
                None => Feature::zeros(kind, params),
            };
            Ok((f, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect()
}

impl<'a> PreparedPair<'a> {
    pub fn new(pair: &'a BenchPair, pair_index: usize, options: &BenchOptions) -> Result<Self> {
        let source_index = pair.source.build_index()?;
        let pr = match pair.source.cached_resolution() {
            Some(pr) => pr,
            None => crate::cloud::compute_resolution_with(pair.source.points(), &source_index)?,
        };
        let source = with_normals(&pair.source, &source_index, options.normal_k)?;
        let target_index = pair.target.build_index()?;
        let target = with_normals(&pair.target, &target_index, options.normal_k)?;
        let sampled = sample_keypoints(
            &source,
            options.n_keypoints,
            keypoint_seed(options.seed, pair_index),
        );
        Ok(PreparedPair {
            pair,
            pair_index,
            pr,
            source,
            source_index,
            target,
            target_index,
            sampled,
            sides: BTreeMap::new(),
        })
    }

    /// Source resolution, the length unit of the pair.
    pub fn resolution(&self) -> f64 {
        self.pr
    }

    /// Sampled source keypoints before frame filtering.
    pub fn sampled_keypoints(&self) -> &[usize] {
        &self.sampled
    }

    fn side(
        &mut self,
        radius_pr: f64,
        kinds: &[DescriptorKind],
        params: &DescriptorParams,
    ) -> Result<&SourceSide> {
        let key = radius_pr.to_bits();
        if !self.sides.contains_key(&key) {
            let r = radius_pr * self.pr;
            let (source, index, pr) = (&self.source, &self.source_index, self.pr);
            let framed: Vec<Option<(usize, Lrf, Vec<Feature>)>> = self
                .sampled
                .par_iter()
                .map(|&k| {
                    let p = source.points()[k];
                    let world = extract_spherical_patch(source, index, &p, r)?;
                    let lrf = match canonical_lrf(&world) {
                        Ok(l) => l,
                        Err(Error::DegenerateGeometry(_)) => return Ok(None),
                        Err(e) => return Err(e),
                    };
                    let feats = describe_all(source, index, &p, &lrf, r, pr, kinds, params)?;
                    Ok(Some((k, lrf, feats.into_iter().map(|(f, _)| f).collect())))
                })
                .collect::<Result<_>>()?;
            let mut side = SourceSide {
                keypoints: Vec::new(),
                lrfs: Vec::new(),
                features: vec![Vec::new(); kinds.len()],
            };
            for (k, lrf, feats) in framed.into_iter().flatten() {
                side.keypoints.push(k);
                side.lrfs.push(lrf);
                for (slot, f) in side.features.iter_mut().zip(feats) {
                    slot.push(f);
                }
            }
            if side.keypoints.is_empty() {
                return Err(Error::DegenerateGeometry(
                    "no sampled source keypoint has a well-defined frame".into(),
                ));
            }
            self.sides.insert(key, side);
        }
        Ok(&self.sides[&key])
    }

    /// Framed source keypoints at `radius_pr` and their features, `[kind][keypoint]`.
    pub fn source_features(
        &mut self,
        radius_pr: f64,
        kinds: &[DescriptorKind],
        params: &DescriptorParams,
    ) -> Result<(Vec<usize>, Vec<Vec<Feature>>)> {
        let side = self.side(radius_pr, kinds, params)?;
        Ok((side.keypoints.clone(), side.features.clone()))
    }

    /// Apply `condition` (repeat `repeat`) and describe both sides of every
    /// surviving correspondence.
    pub fn extract(
        &mut self,
        condition: &Condition,
        repeat: usize,
        kinds: &[DescriptorKind],
        options: &BenchOptions,
    ) -> Result<PairFeatures> {
        let radius_pr = match condition {
            Condition::SupportRadius(r) => *r,
            _ => options.radius_pr,
        };
        let params = &options.params;
        let pr = self.pr;
        let r = radius_pr * pr;
        let inlier = options.inlier_radius_pr * pr;
        let nseed = nuisance_seed(options.seed, self.pair_index, repeat);
        let transform = self.pair.transform;
        self.side(radius_pr, kinds, params)?;
        let side = &self.sides[&radius_pr.to_bits()];

        let perturbed = match condition {
            Condition::Nuisance { kind, level } => {
                let spec = NuisanceSpec::new(*kind, *level, nseed)?;
                match perturb_cloud(&self.target, &spec, pr, r)? {
                    Some(mut c) => {
                        let index = c.build_index()?;
                        c.clear_normals();
                        Some(estimate_normals_with(&c, &index, options.normal_k)?.cloud)
                    }
                    None => None,
                }
            }
            _ => None,
        };
        let rebuilt;
        let (target, target_index): (Cow<PointCloud>, &SpatialIndex) = match perturbed {
            Some(c) => {
                rebuilt = c.build_index()?;
                (Cow::Owned(c), &rebuilt)
            }
            None => (Cow::Borrowed(&self.target), &self.target_index),
        };

        let mut set: CorrespondenceSet = correspondences_for(
            &self.source,
            &side.keypoints,
            target_index,
            &transform,
            inlier,
        )?;
        if let Condition::Nuisance {
            kind: NuisanceKind::KeypointError,
            level,
        } = condition
        {
            set = perturb_keypoints(&target, &set, *level, pr)?;
        }
        if set.len() < 2 {
            return Err(Error::invalid(format!(
                "{} correspondence(s) survived; matching needs at least 2",
                set.len()
            )));
        }
        let slots: Vec<usize> = set
            .pairs
            .iter()
            .map(|c| {
                side.keypoints
                    .binary_search(&c.source)
                    .expect("source keypoint is cached")
            })
            .collect();
        let positions: Vec<Vec3> = set
            .pairs
            .iter()
            .map(|c| target.points()[c.target])
            .collect();

        let target_feats: Vec<Vec<(Feature, f64)>> = set
            .pairs
            .par_iter()
            .zip(&slots)
            .map(|(c, &slot)| {
                let tp = target.points()[c.target];
                let mut lrf = propagate_lrf(&side.lrfs[slot], &transform).with_origin(tp);
                if let Condition::Nuisance {
                    kind: NuisanceKind::LrfError(axes),
                    level,
                } = condition
                {
                    lrf = perturb_lrf(&lrf, *level, *axes, lrf_seed(nseed, c.source))?;
                }
                describe_all(&target, target_index, &tp, &lrf, r, pr, kinds, params)
            })
            .collect::<Result<_>>()?;

        let extract_ms = (0..kinds.len())
            .map(|ki| target_feats.iter().map(|f| f[ki].1).sum())
            .collect();
        let target_features = (0..kinds.len())
            .map(|ki| target_feats.iter().map(|f| f[ki].0.clone()).collect())
            .collect();
        let source_features = (0..kinds.len())
            .map(|ki| {
                slots
                    .iter()
                    .map(|&s| side.features[ki][s].clone())
                    .collect()
            })
            .collect();
        Ok(PairFeatures {
            kinds: kinds.to_vec(),
            source_keypoints: set.pairs.iter().map(|c| c.source).collect(),
            target_keypoints: set.pairs.iter().map(|c| c.target).collect(),
            positions,
            inlier_radius: inlier,
            source: source_features,
            target: target_features,
            extract_ms,
            short: set.is_short(),
        })
    }

    /// Apply `condition` (repeat `repeat`) and match every kind.
    pub fn run(
        &mut self,
        condition: &Condition,
        repeat: usize,
        kinds: &[DescriptorKind],
        options: &BenchOptions,
    ) -> Result<PairRun> {
        let features = self.extract(condition, repeat, kinds, options)?;
        let taus = tau_grid(options.tau_steps)?;
        let runs = (0..kinds.len())
            .map(|ki| {
                let counts = features.match_kind(ki, &taus)?;
                let curve = compute_rpc(&counts)?;
                Ok(KindRun {
                    counts,
                    curve,
                    extract_ms: features.extract_ms[ki],
                    features: features.len(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(PairRun {
            correspondences: features.len(),
            short: features.short,
            kinds: runs,
        })
    }
}

/// Both sides of the ground-truth correspondences of one pair run. Entry `i`
/// of every list belongs to correspondence `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFeatures {
    pub kinds: Vec<DescriptorKind>,
    pub source_keypoints: Vec<usize>,
    pub target_keypoints: Vec<usize>,
    /// Target keypoint positions, used to judge matches.
    pub positions: Vec<Vec3>,
    pub inlier_radius: f64,
    /// `[kind][correspondence]`
    pub source: Vec<Vec<Feature>>,
    pub target: Vec<Vec<Feature>>,
    /// Summed target-side extraction time per kind.
    pub extract_ms: Vec<f64>,
    pub short: bool,
}

impl PairFeatures {
    pub fn len(&self) -> usize {
        self.source_keypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source_keypoints.is_empty()
    }

    /// Ratio-test counts of kind `ki` over `taus`.
    pub fn match_kind(&self, ki: usize, taus: &[f64]) -> Result<Vec<MatchCounts>> {
        match_features(
            &self.source[ki],
            &self.target[ki],
            &self.positions,
            self.inlier_radius,
            taus,
        )
    }
}

/// Aggregate of one descriptor under one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub kind: DescriptorKind,
    pub condition: Condition,
    /// Mean AUC over successful pair runs.
    pub auc: f64,
    /// Curve from counts pooled over all successful pair runs.
    pub rpc: RpcCurve,
    /// Serialized payload size of one feature.
    pub bytes: usize,
    /// Mean target-side extraction time per feature.
    pub mean_time_ms: f64,
    pub n_corr: usize,
    /// Successful pair runs (pairs × repeats).
    pub n_pairs: usize,
    /// Per-run AUCs in pair-major, repeat-minor order.
    pub run_aucs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairFailure {
    pub pair: String,
    pub condition: String,
    pub repeat: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub dataset: String,
    pub options: BenchOptions,
    pub kinds: Vec<DescriptorKind>,
    pub conditions: Vec<Condition>,
    /// Condition-major, then kinds in request order.
    pub cells: Vec<CellResult>,
    pub failures: Vec<PairFailure>,
    pub pair_count: usize,
}

impl BenchReport {
    pub fn cell(&self, kind: DescriptorKind, condition: &Condition) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.kind == kind && &c.condition == condition)
    }
}

fn pair_applies(pair: &BenchPair, condition: &Condition) -> bool {
    match condition {
        Condition::Group { key, value } => pair.labels.get(key) == Some(value),
        _ => true,
    }
}

/// Run every pair under every condition for every kind.
///
/// Failures of individual pairs are recorded in the report and skipped. An
/// empty condition list means a single baseline condition.
pub fn run_benchmark(
    dataset: &str,
    pairs: &[BenchPair],
    kinds: &[DescriptorKind],
    conditions: &[Condition],
    options: &BenchOptions,
) -> Result<BenchReport> {
    options.validate()?;
    if kinds.is_empty() {
        return Err(Error::invalid("no descriptor kinds requested"));
    }
    for c in conditions {
        if let Condition::Nuisance { kind, level } = c {
            NuisanceSpec::new(*kind, *level, 0)?;
        }
        if let Condition::SupportRadius(r) = c {
            if !(*r > 0.0) {
                return Err(Error::invalid(format!(
                    "support radius must be positive, got {r}"
                )));
            }
        }
    }
    match options.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {n} workers: {e}")))?
            .install(|| run_grid(dataset, pairs, kinds, conditions, options)),
        None => run_grid(dataset, pairs, kinds, conditions, options),
    }
}

fn run_grid(
    dataset: &str,
    pairs: &[BenchPair],
    kinds: &[DescriptorKind],
    conditions: &[Condition],
    options: &BenchOptions,
) -> Result<BenchReport> {
    let conditions: Vec<Condition> = if conditions.is_empty() {
        vec![Condition::Baseline]
    } else {
        conditions.to_vec()
    };
    let taus = tau_grid(options.tau_steps)?;
    let mut failures = Vec::new();
    // results[condition][pair][repeat]
    let mut results: Vec<Vec<Vec<Option<PairRun>>>> =
        vec![vec![vec![None; options.repeats]; pairs.len()]; conditions.len()];
    for (pi, pair) in pairs.iter().enumerate() {
        let mut prepared = match PreparedPair::new(pair, pi, options) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("pair {} skipped: {e}", pair.name);
                failures.push(PairFailure {
                    pair: pair.name.clone(),
                    condition: "prepare".into(),
                    repeat: 0,
                    message: e.to_string(),
                });
                continue;
            }
        };
        for (ci, condition) in conditions.iter().enumerate() {
            if !pair_applies(pair, condition) {
                continue;
            }
            for repeat in 0..options.repeats {
                match prepared.run(condition, repeat, kinds, options) {
                    Ok(run) => {
                        if run.short {
                            log::info!(
                                "pair {} under {condition}: {} of {} correspondences",
                                pair.name,
                                run.correspondences,
                                options.n_keypoints
                            );
                        }
                        results[ci][pi][repeat] = Some(run);
                    }
                    Err(e) => {
                        log::warn!(
                            "pair {} under {condition} (repeat {repeat}) failed: {e}",
                            pair.name
                        );
                        failures.push(PairFailure {
                            pair: pair.name.clone(),
                            condition: condition.to_string(),
                            repeat,
                            message: e.to_string(),
                        });
                    }
                }
            }
        }
    }

    let mut cells = Vec::new();
    for (ci, condition) in conditions.iter().enumerate() {
        let runs: Vec<&PairRun> = results[ci].iter().flatten().flatten().collect();
        for (ki, &kind) in kinds.iter().enumerate() {
            let mut pooled: Vec<MatchCounts> = taus
                .iter()
                .map(|&tau| MatchCounts {
                    tau,
                    n_corr: 0,
                    n_match: 0,
                    n_correct: 0,
                })
                .collect();
            let mut run_aucs = Vec::with_capacity(runs.len());
            let (mut ms, mut feats) = (0.0, 0usize);
            for run in &runs {
                let kr = &run.kinds[ki];
                for (p, c) in pooled.iter_mut().zip(&kr.counts) {
                    p.merge(c);
                }
                run_aucs.push(kr.curve.auc);
                ms += kr.extract_ms;
                feats += kr.features;
            }
            let auc = if run_aucs.is_empty() {
                0.0
            } else {
                run_aucs.iter().sum::<f64>() / run_aucs.len() as f64
            };
            cells.push(CellResult {
                kind,
                condition: condition.clone(),
                auc,
                rpc: compute_rpc(&pooled)?,
                bytes: kind.payload_bytes(&options.params),
                mean_time_ms: if feats > 0 {
                    (ms / feats as f64).max(1e-9)
                } else {
                    0.0
                },
                n_corr: runs.iter().map(|r| r.correspondences).sum(),
                n_pairs: runs.len(),
                run_aucs,
            });
        }
    }
    Ok(BenchReport {
        dataset: dataset.into(),
        options: options.clone(),
        kinds: kinds.to_vec(),
        conditions,
        cells,
        failures,
        pair_count: pairs.len(),
    })
}
