use std::path::Path;
use std::process::{Command, Output};

use localfeat::bench::{run_benchmark, BenchOptions, BenchPair, Condition};
use localfeat::io::{read_ply, read_pose, read_report_csv};
use localfeat::DescriptorKind;

fn localfeat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_localfeat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = localfeat(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = localfeat(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn bench_help_lists_defaults() {
    let out = localfeat(&["bench", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in [
        "--radius-pr",
        "--descriptor",
        "--nuisance",
        "--tau-steps",
        "--seed",
        "--jobs",
        "--out",
    ] {
        assert!(text.contains(flag), "missing {flag}");
    }
    assert!(text.contains("[default: 101]"));
}

#[test]
fn bad_flag_values_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = localfeat(&[
        "perturb",
        "--input",
        "x.ply",
        "--nuisance",
        "gaussian=9",
        "--out",
        "y.ply",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = localfeat(&[
        "extract",
        "--source",
        "x.ply",
        "--descriptor",
        "sift",
        "--out",
        "f",
    ]);
    assert_eq!(out.status.code(), Some(1));

    ok(&["gen", "--points", "400", "--out", s(dir.path())]);
    let target = dir.path().join("target.ply");
    let out = localfeat(&[
        "perturb",
        "--input",
        s(&target),
        "--nuisance",
        "keypoint=2",
        "--out",
        s(&dir.path().join("p.ply")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_and_malformed_inputs_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = localfeat(&[
        "perturb",
        "--input",
        s(&dir.path().join("absent.ply")),
        "--nuisance",
        "gaussian=0.5",
        "--out",
        s(&dir.path().join("p.ply")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let bad = dir.path().join("bad.ply");
    std::fs::write(
        &bad,
        "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nend_header\n1\n",
    )
    .unwrap();
    let out = localfeat(&[
        "extract",
        "--source",
        s(&bad),
        "--out",
        s(&dir.path().join("f")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pipeline_matches_library_auc() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (source, target, pose) = (
        d.join("source.ply"),
        d.join("target.ply"),
        d.join("pose.txt"),
    );
    let noisy = d.join("noisy.ply");
    ok(&[
        "gen",
        "--shape",
        "heightfield",
        "--points",
        "3000",
        "--seed",
        "4",
        "--out",
        s(d),
    ]);
    ok(&[
        "perturb",
        "--input",
        s(&target),
        "--nuisance",
        "gaussian=0.5",
        "--seed",
        "9",
        "--out",
        s(&noisy),
    ]);
    for side in ["source", "target"] {
        ok(&[
            "extract",
            "--source",
            s(&source),
            "--target",
            s(&noisy),
            "--pose",
            s(&pose),
            "--side",
            side,
            "--descriptor",
            "lovs",
            "--keypoints",
            "400",
            "--seed",
            "3",
            "--out",
            s(&d.join(format!("{side}.lfd"))),
        ]);
    }
    let summary = d.join("match.csv");
    let out = ok(&[
        "match",
        "--source-features",
        s(&d.join("source.lfd")),
        "--target-features",
        s(&d.join("target.lfd")),
        "--source",
        s(&source),
        "--target",
        s(&noisy),
        "--out",
        s(&summary),
        "--rpc",
        s(&d.join("rpc.csv")),
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("auc="));
    let rows = read_report_csv(&summary).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].kind, "LoVS");
    assert_eq!(rows[0].bytes, 92);

    // Same files, same seed, straight through the library.
    let pair = BenchPair {
        name: "oracle".into(),
        source: read_ply(&source).unwrap(),
        target: read_ply(&noisy).unwrap(),
        transform: read_pose(&pose).unwrap(),
        labels: Default::default(),
    };
    let options = BenchOptions {
        seed: 3,
        n_keypoints: 400,
        ..BenchOptions::default()
    };
    let report = run_benchmark(
        "oracle",
        &[pair],
        &[DescriptorKind::Lovs],
        &[Condition::Baseline],
        &options,
    )
    .unwrap();
    let cell = report
        .cell(DescriptorKind::Lovs, &Condition::Baseline)
        .unwrap();
    assert_eq!(rows[0].n_corr, cell.n_corr);
    assert_eq!(rows[0].auc, cell.auc);
    assert!(
        cell.auc > 0.0 && cell.auc < 1.0,
        "noise should bite: {}",
        cell.auc
    );
}

#[test]
fn mismatched_dumps_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen", "--points", "600", "--out", s(d)]);
    let source = d.join("source.ply");
    for (kind, n) in [("shot", "50"), ("lovs", "50")] {
        ok(&[
            "extract",
            "--source",
            s(&source),
            "--descriptor",
            kind,
            "--keypoints",
            n,
            "--out",
            s(&d.join(format!("{kind}.lfd"))),
        ]);
    }
    let out = localfeat(&[
        "match",
        "--source-features",
        s(&d.join("shot.lfd")),
        "--target-features",
        s(&d.join("lovs.lfd")),
        "--source",
        s(&source),
        "--target",
        s(&source),
        "--out",
        s(&d.join("m.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_is_reproducible_and_reports_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let manifest = d.join("m.toml");
    std::fs::write(
        &manifest,
        r#"
schema_version = 1
name = "tiny"
conditions = ["baseline", "decimate-random=1/2"]

[[pair]]
name = "a"
synthetic = { kind = "heightfield", points = 1500, seed = 1, pose_seed = 2 }

[[pair]]
name = "b"
synthetic = { kind = "bumpy-sphere", points = 1500, seed = 3, pose_seed = 4 }
"#,
    )
    .unwrap();
    let run = |out: &str| {
        ok(&[
            "bench",
            "--manifest",
            s(&manifest),
            "--descriptor",
            "lovs",
            "--descriptor",
            "rcs",
            "--keypoints",
            "150",
            "--jobs",
            "2",
            "--out",
            s(&d.join(out)),
        ])
    };
    let first = run("r1");
    run("r2");
    for f in ["report.csv", "report.txt", "failures.csv"] {
        let a = std::fs::read(d.join("r1").join(f)).unwrap();
        let b = std::fs::read(d.join("r2").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
    assert!(String::from_utf8_lossy(&first.stdout).contains("[decimate-random=0.5]"));
    let rows = read_report_csv(&d.join("r1").join("report.csv")).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.n_pairs == 2));

    let merged = d.join("merged.csv");
    ok(&[
        "report",
        s(&d.join("r1")),
        s(&d.join("r2")),
        "--out",
        s(&merged),
    ]);
    let merged = read_report_csv(&merged).unwrap();
    assert_eq!(merged.len(), 4);
    for m in &merged {
        let r = rows
            .iter()
            .find(|r| r.kind == m.kind && r.condition == m.condition)
            .unwrap();
        assert_eq!(m.n_pairs, 4);
        assert!((m.auc - r.auc).abs() < 1e-12);
    }
}

#[test]
fn timing_writes_one_row_per_kind_and_radius() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("t").join("timing.csv");
    ok(&[
        "timing",
        "--points",
        "2000",
        "--patches",
        "20",
        "--radii",
        "5,10",
        "--rounds",
        "1",
        "--descriptor",
        "shot",
        "--descriptor",
        "usc",
        "--out",
        s(&out_csv),
    ]);
    let text = std::fs::read_to_string(&out_csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 4);
    assert!(text.starts_with("kind,radius_pr,patches,mean_ms,median_ms"));
}
