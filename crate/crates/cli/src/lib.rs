//! The `localfeat` command line: synthetic pair generation, perturbation,
//! feature extraction to dump files, matching, benchmark grids from a
//! manifest, the timing protocol and report aggregation.
//!
//! Exit codes are 0 on success, 1 on a usage error and 2 on a data error.
//! Diagnostics go to stderr; stdout carries results only.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{ArgAction, Args, Parser, Subcommand};
use localfeat::bench::{
    compute_rpc, parse_conditions, run_benchmark, standard_timing_radii, tau_grid,
    time_descriptors, timing_patches, BenchOptions, BenchPair, Condition, PreparedPair,
    DEFAULT_TAU_STEPS, DEFAULT_TIMING_ROUNDS,
};
use localfeat::descriptors::dump::FeatureDump;
use localfeat::io::{
    aggregate_reports, format_report, generate_shape, generate_synthetic_pair, load_manifest,
    read_ply, read_pose, report_rows_csv, write_ply, write_pose, write_report, write_report_rows,
    write_rpc_csv, write_timing_rows, PlyEncoding, ReportRow, ShapeKind, SyntheticShapeSpec,
    REPORT_CSV,
};
use localfeat::normals::{estimate_normals, DEFAULT_NORMAL_K};
use localfeat::nuisance::{perturb_cloud, NuisanceKind, NuisanceSpec};
use localfeat::{
    compute_resolution, DescriptorKind, DescriptorParams, Error, PointCloud, RigidTransform,
    DEFAULT_SUPPORT_RADIUS_PR,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// File names written by `gen`.
pub const SOURCE_PLY: &str = "source.ply";
pub const TARGET_PLY: &str = "target.ply";
pub const POSE_FILE: &str = "pose.txt";
/// Extension of feature dump files.
pub const DUMP_EXT: &str = "lfd";

#[derive(Debug, Parser)]
#[command(
    name = "localfeat",
    version,
    about = "Local 3D feature descriptors and their matching benchmark",
    propagate_version = true
)]
pub struct Cli {
    /// Worker threads [default: one per core]. Results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,

    /// Log more on stderr; repeat for more detail [default: warnings only].
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic source/target pair with its ground-truth pose.
    Gen(GenArgs),
    /// Apply one nuisance to a cloud.
    Perturb(PerturbArgs),
    /// Describe keypoints at ground-truth frames and write feature dumps.
    Extract(ExtractArgs),
    /// Match two dumps record by record and write the curve and its AUC.
    Match(MatchArgs),
    /// Run the full descriptor × condition grid over a manifest.
    Bench(BenchArgs),
    /// Time every descriptor over a range of support radii.
    Timing(TimingArgs),
    /// Merge report.csv files, weighting AUCs by run count.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Surface family: bumpy-sphere, heightfield or superellipsoid.
    #[arg(long, default_value = "bumpy-sphere", value_parser = parse_with::<ShapeKind>)]
    pub shape: ShapeKind,
    /// Points in the source cloud.
    #[arg(long, default_value_t = 5000)]
    pub points: usize,
    /// Shape seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seed of the ground-truth pose.
    #[arg(long, default_value_t = 1)]
    pub pose_seed: u64,
    /// Resolution the cloud is scaled to.
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
    /// PLY encoding: binary or ascii.
    #[arg(long, default_value = "binary", value_parser = parse_with::<PlyEncoding>)]
    pub encoding: PlyEncoding,
    /// Output directory; receives source.ply, target.ply and pose.txt.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    /// Input PLY.
    #[arg(long)]
    pub input: PathBuf,
    /// Nuisance as kind=level, e.g. gaussian=0.5, shot=3% or decimate-random=1/8.
    /// Noise levels are in pr of the input.
    #[arg(long, value_parser = parse_nuisance)]
    pub nuisance: NuisanceSpec,
    /// Support radius in pr; sets the shot-noise distance (0.8 R).
    #[arg(long, default_value_t = DEFAULT_SUPPORT_RADIUS_PR)]
    pub radius_pr: f64,
    /// Nuisance seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Neighbors for normal estimation when the input has none.
    #[arg(long, default_value_t = DEFAULT_NORMAL_K)]
    pub normal_k: usize,
    /// PLY encoding: binary or ascii.
    #[arg(long, default_value = "binary", value_parser = parse_with::<PlyEncoding>)]
    pub encoding: PlyEncoding,
    /// Output PLY, written without normals.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Side {
    Source,
    Target,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Source cloud; keypoints are sampled from it.
    #[arg(long)]
    pub source: PathBuf,
    /// Target cloud. With --pose, only keypoints with a target
    /// correspondence are kept and both sides line up record by record.
    #[arg(long, requires = "pose")]
    pub target: Option<PathBuf>,
    /// Ground-truth pose mapping source onto target.
    #[arg(long, requires = "target")]
    pub pose: Option<PathBuf>,
    /// Which side to describe.
    #[arg(long, value_enum, default_value_t = Side::Source)]
    pub side: Side,
    /// Descriptor (repeatable) [default: all nine].
    #[arg(long = "descriptor", value_parser = parse_with::<DescriptorKind>)]
    pub descriptors: Vec<DescriptorKind>,
    /// Keypoints sampled from the source.
    #[arg(long, default_value_t = 1000)]
    pub keypoints: usize,
    /// Support radius in pr of the source.
    #[arg(long, default_value_t = DEFAULT_SUPPORT_RADIUS_PR)]
    pub radius_pr: f64,
    /// Correspondence tolerance in pr of the source.
    #[arg(long, default_value_t = 2.0)]
    pub inlier_radius_pr: f64,
    /// Keypoint sampling seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Neighbors for normal estimation.
    #[arg(long, default_value_t = DEFAULT_NORMAL_K)]
    pub normal_k: usize,
    /// Dump file for one descriptor, or a directory receiving <kind>.lfd
    /// for several.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// Source-side dump.
    #[arg(long)]
    pub source_features: PathBuf,
    /// Target-side dump; record i corresponds to source record i.
    #[arg(long)]
    pub target_features: PathBuf,
    /// Source cloud; its resolution sets the inlier radius.
    #[arg(long)]
    pub source: PathBuf,
    /// Target cloud the target dump indexes into.
    #[arg(long)]
    pub target: PathBuf,
    /// Ratio-test thresholds, evenly spaced over [0, 1].
    #[arg(long, default_value_t = DEFAULT_TAU_STEPS)]
    pub tau_steps: usize,
    /// Match-correctness tolerance in pr of the source.
    #[arg(long, default_value_t = 2.0)]
    pub inlier_radius_pr: f64,
    /// Summary CSV with the report.csv columns.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional curve CSV (tau, one_minus_precision, recall).
    #[arg(long)]
    pub rpc: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Dataset manifest (TOML).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Descriptor (repeatable) [default: all nine].
    #[arg(long = "descriptor", value_parser = parse_with::<DescriptorKind>)]
    pub descriptors: Vec<DescriptorKind>,
    /// Single condition kind=level (repeatable).
    #[arg(long = "nuisance", value_parser = parse_nuisance)]
    pub nuisances: Vec<NuisanceSpec>,
    /// Condition or sweep (repeatable): baseline, gaussian, shot=3%,
    /// support-radius, group:overlap ... [default: the manifest's list, else baseline].
    #[arg(long = "sweep", value_parser = parse_condition_list)]
    pub sweeps: Vec<Vec<Condition>>,
    /// Keypoints sampled per source.
    #[arg(long, default_value_t = 1000)]
    pub keypoints: usize,
    /// Support radius in pr [default: the manifest's, else 15].
    #[arg(long)]
    pub radius_pr: Option<f64>,
    /// Match-correctness tolerance in pr.
    #[arg(long, default_value_t = 2.0)]
    pub inlier_radius_pr: f64,
    /// Ratio-test thresholds, evenly spaced over [0, 1].
    #[arg(long, default_value_t = DEFAULT_TAU_STEPS)]
    pub tau_steps: usize,
    /// Master seed for keypoints and nuisances.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent nuisance realizations per pair.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Neighbors for normal estimation.
    #[arg(long, default_value_t = DEFAULT_NORMAL_K)]
    pub normal_k: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    /// Cloud to cut patches from [default: a synthetic shape].
    #[arg(long)]
    pub cloud: Option<PathBuf>,
    /// Synthetic shape used without --cloud.
    #[arg(long, default_value = "bumpy-sphere", value_parser = parse_with::<ShapeKind>)]
    pub shape: ShapeKind,
    /// Points of the synthetic shape.
    #[arg(long, default_value_t = 20000)]
    pub points: usize,
    /// Patches per radius.
    #[arg(long, default_value_t = 1000)]
    pub patches: usize,
    /// Support radii in pr, comma separated [default: 5,10,15,20,25,30].
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<f64>,
    /// Descriptor (repeatable) [default: all nine].
    #[arg(long = "descriptor", value_parser = parse_with::<DescriptorKind>)]
    pub descriptors: Vec<DescriptorKind>,
    /// Timed rounds after one warm-up round.
    #[arg(long, default_value_t = DEFAULT_TIMING_ROUNDS)]
    pub rounds: usize,
    /// Seed for the shape and the keypoint sample.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// report.csv files, or directories holding one.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Merged CSV [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_with<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_nuisance(s: &str) -> Result<NuisanceSpec, String> {
    NuisanceSpec::parse(s, 0).map_err(|e| e.to_string())
}

fn parse_condition_list(s: &str) -> Result<Vec<Condition>, String> {
    parse_conditions(s).map_err(|e| e.to_string())
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Data(e) => write!(f, "{e}"),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Parse `argv` (program name first), run the command and return the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.verbose);
    if let Some(n) = cli.jobs {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .is_err()
        {
            log::debug!("thread pool already configured");
        }
    }
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("\nFor more information, try '--help'.");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .try_init();
}

pub fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Perturb(a) => perturb(a),
        Command::Extract(a) => extract(a),
        Command::Match(a) => match_dumps(a),
        Command::Bench(a) => bench(a, cli.jobs.map(|n| n as usize)),
        Command::Timing(a) => timing(a),
        Command::Report(a) => report(a),
    }
}

fn create_dir(dir: &Path) -> CmdResult {
    fs::create_dir_all(dir).map_err(|e| {
        Failure::Data(Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })
    })
}

fn kinds_or_all(kinds: &[DescriptorKind]) -> Vec<DescriptorKind> {
    if kinds.is_empty() {
        return DescriptorKind::ALL.to_vec();
    }
    let mut out: Vec<DescriptorKind> = Vec::new();
    for k in kinds {
        if !out.contains(k) {
            out.push(*k);
        }
    }
    out
}

fn gen(a: &GenArgs) -> CmdResult {
    let spec = SyntheticShapeSpec {
        resolution: a.resolution,
        ..SyntheticShapeSpec::new(a.shape, a.points, a.seed, a.pose_seed)
    };
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let (source, target, pose) = generate_synthetic_pair(&spec)?;
    create_dir(&a.out)?;
    write_ply(&source, &a.out.join(SOURCE_PLY), a.encoding)?;
    write_ply(&target, &a.out.join(TARGET_PLY), a.encoding)?;
    write_pose(&pose, &a.out.join(POSE_FILE))?;
    log::info!(
        "wrote {} points per cloud to {}",
        source.len(),
        a.out.display()
    );
    Ok(())
}

fn perturb(a: &PerturbArgs) -> CmdResult {
    let spec = NuisanceSpec {
        seed: a.seed,
        ..a.nuisance
    };
    if matches!(
        spec.kind,
        NuisanceKind::KeypointError | NuisanceKind::LrfError(_)
    ) {
        return Err(Failure::Usage(format!(
            "`{}` perturbs keypoints or frames, not clouds; use it with bench",
            spec.kind
        )));
    }
    if !(a.radius_pr > 0.0) {
        return Err(Failure::Usage("--radius-pr must be positive".into()));
    }
    let mut cloud = read_ply(&a.input)?;
    let pr = compute_resolution(&cloud)?;
    if spec.kind == NuisanceKind::ShotNoise && cloud.normals().is_none() {
        cloud = estimate_normals(&cloud, a.normal_k)?.cloud;
    }
    let mut out = perturb_cloud(&cloud, &spec, pr, a.radius_pr * pr)?.unwrap_or(cloud);
    out.clear_normals();
    write_ply(&out, &a.out, a.encoding)?;
    log::info!("{} points after {}={}", out.len(), spec.kind, spec.level);
    Ok(())
}

fn options(
    keypoints: usize,
    radius_pr: f64,
    inlier_radius_pr: f64,
    seed: u64,
    normal_k: usize,
) -> BenchOptions {
    BenchOptions {
        seed,
        n_keypoints: keypoints,
        radius_pr,
        inlier_radius_pr,
        normal_k,
        ..BenchOptions::default()
    }
}

fn extract(a: &ExtractArgs) -> CmdResult {
    let kinds = kinds_or_all(&a.descriptors);
    let opts = options(
        a.keypoints,
        a.radius_pr,
        a.inlier_radius_pr,
        a.seed,
        a.normal_k,
    );
    opts.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    if a.side == Side::Target && a.target.is_none() {
        return Err(Failure::Usage(
            "--side target needs --target and --pose".into(),
        ));
    }
    let source = read_ply(&a.source)?;
    let (target, transform) = match (&a.target, &a.pose) {
        (Some(t), Some(p)) => (Some(read_ply(t)?), read_pose(p)?),
        _ => (None, RigidTransform::identity()),
    };
    let paired = target.is_some();
    let pair = BenchPair {
        name: a.source.display().to_string(),
        target: target.unwrap_or_else(|| source.clone()),
        source,
        transform,
        labels: Default::default(),
    };
    let mut prepared = PreparedPair::new(&pair, 0, &opts)?;
    let (keypoints, features): (Vec<usize>, Vec<Vec<_>>) = if paired {
        let f = prepared.extract(&Condition::Baseline, 0, &kinds, &opts)?;
        match a.side {
            Side::Source => (f.source_keypoints, f.source),
            Side::Target => (f.target_keypoints, f.target),
        }
    } else {
        prepared.source_features(a.radius_pr, &kinds, &opts.params)?
    };

    let paths: Vec<PathBuf> = if kinds.len() == 1 {
        vec![a.out.clone()]
    } else {
        create_dir(&a.out)?;
        kinds
            .iter()
            .map(|k| {
                a.out
                    .join(format!("{}.{DUMP_EXT}", k.name().to_ascii_lowercase()))
            })
            .collect()
    };
    for ((kind, feats), path) in kinds.iter().zip(features).zip(&paths) {
        let mut dump = FeatureDump::new(*kind, kind.dimension(&opts.params));
        for (&k, f) in keypoints.iter().zip(feats) {
            dump.push(k as u64, f)?;
        }
        dump.write_file(path)?;
    }
    log::info!("described {} keypoints", keypoints.len());
    Ok(())
}

fn match_dumps(a: &MatchArgs) -> CmdResult {
    let taus = tau_grid(a.tau_steps).map_err(|e| Failure::Usage(e.to_string()))?;
    if !(a.inlier_radius_pr >= 0.0) {
        return Err(Failure::Usage(
            "--inlier-radius-pr must be non-negative".into(),
        ));
    }
    let src = FeatureDump::read_file(&a.source_features)?;
    let tgt = FeatureDump::read_file(&a.target_features)?;
    if src.kind != tgt.kind {
        return Err(Error::Validation(format!(
            "dumps hold {} and {} features",
            src.kind, tgt.kind
        ))
        .into());
    }
    if src.records.len() != tgt.records.len() {
        return Err(Error::Validation(format!(
            "dumps hold {} and {} records; extract both sides with the same source, target and pose",
            src.records.len(),
            tgt.records.len()
        ))
        .into());
    }
    let source = read_ply(&a.source)?;
    let target = read_ply(&a.target)?;
    let pr = compute_resolution(&source)?;
    let positions = tgt
        .records
        .iter()
        .map(|r| {
            target
                .points()
                .get(r.keypoint as usize)
                .copied()
                .ok_or_else(|| {
                    Error::Validation(format!(
                        "target keypoint {} is outside the {}-point target",
                        r.keypoint,
                        target.len()
                    ))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let counts = localfeat::bench::match_features(
        &src.features(),
        &tgt.features(),
        &positions,
        a.inlier_radius_pr * pr,
        &taus,
    )?;
    let curve = compute_rpc(&counts)?;
    let row = ReportRow {
        kind: src.kind.name().into(),
        condition: "match".into(),
        level: None,
        auc: curve.auc,
        bytes: src.payload_bytes(),
        n_corr: positions.len(),
        n_pairs: 1,
    };
    if let Some(path) = &a.rpc {
        write_rpc_csv(path, &curve)?;
    }
    write_report_rows(&a.out, &[row])?;
    println!(
        "{} auc={:.6} correspondences={}",
        src.kind,
        curve.auc,
        positions.len()
    );
    Ok(())
}

fn bench(a: &BenchArgs, jobs: Option<usize>) -> CmdResult {
    let manifest = load_manifest(&a.manifest)?;
    let kinds = kinds_or_all(&a.descriptors);
    let mut conditions: Vec<Condition> = Vec::new();
    let explicit = a
        .nuisances
        .iter()
        .map(|s| Condition::Nuisance {
            kind: s.kind,
            level: s.level,
        })
        .chain(a.sweeps.iter().flatten().cloned());
    for c in explicit {
        if !conditions.contains(&c) {
            conditions.push(c);
        }
    }
    if conditions.is_empty() {
        conditions = manifest.expanded_conditions()?;
    }
    let mut opts = options(
        a.keypoints,
        a.radius_pr.unwrap_or(manifest.support_radius_pr),
        a.inlier_radius_pr,
        a.seed,
        a.normal_k,
    );
    opts.tau_steps = a.tau_steps;
    opts.repeats = a.repeats;
    opts.jobs = jobs;
    opts.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let pairs = (0..manifest.pairs.len())
        .map(|i| manifest.load_pair(i))
        .collect::<Result<Vec<BenchPair>, _>>()?;
    let report = run_benchmark(&manifest.name, &pairs, &kinds, &conditions, &opts)?;
    create_dir(&a.out)?;
    write_report(&report, &a.out)?;
    print!("{}", format_report(&report));
    if !report.failures.is_empty() {
        log::warn!(
            "{} pair run(s) failed; see failures.csv",
            report.failures.len()
        );
    }
    Ok(())
}

fn timing(a: &TimingArgs) -> CmdResult {
    let kinds = kinds_or_all(&a.descriptors);
    let radii = if a.radii.is_empty() {
        standard_timing_radii()
    } else {
        a.radii.clone()
    };
    if radii.iter().any(|r| !(*r > 0.0)) || a.patches == 0 || a.rounds == 0 {
        return Err(Failure::Usage(
            "radii, patches and rounds must be positive".into(),
        ));
    }
    let cloud: PointCloud = match &a.cloud {
        Some(path) => read_ply(path)?,
        None => {
            let spec = SyntheticShapeSpec::new(a.shape, a.points, a.seed, 0);
            spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            generate_shape(&spec)?
        }
    };
    let pr = compute_resolution(&cloud)?;
    let sets = timing_patches(&cloud, a.patches, &radii, a.seed)?;
    let params = DescriptorParams::default();
    let rows = time_descriptors(&sets, &kinds, &params, pr, a.rounds)?;

    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_timing_rows(&a.out, &rows)?;
    println!(
        "{:<8} {:>8} {:>8} {:>10} {:>10}",
        "kind", "radius", "patches", "mean_ms", "median_ms"
    );
    for r in &rows {
        println!(
            "{:<8} {:>8} {:>8} {:>10.4} {:>10.4}",
            r.kind.name(),
            r.radius_pr,
            r.patches,
            r.mean_ms,
            r.median_ms
        );
    }
    Ok(())
}

fn report(a: &ReportArgs) -> CmdResult {
    let paths: Vec<PathBuf> = a
        .inputs
        .iter()
        .map(|p| {
            if p.is_dir() {
                p.join(REPORT_CSV)
            } else {
                p.clone()
            }
        })
        .collect();
    let rows = aggregate_reports(&paths)?;
    match &a.out {
        Some(out) => write_report_rows(out, &rows)?,
        None => print!("{}", report_rows_csv(&rows)?),
    }
    Ok(())
}
