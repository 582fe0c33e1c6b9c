use std::path::PathBuf;

use localfeat::bench::{run_benchmark, BenchOptions, Condition};
use localfeat::io::{
    aggregate_reports, format_pose, load_manifest, parse_pose, read_csv, read_ply, read_pose,
    read_report_csv, write_ply, write_pose, write_report, PlyEncoding, RpcRow, SyntheticShapeSpec,
    FAILURES_CSV, METADATA_FILE, REPORT_CSV, RPC_DIR, TIMING_CSV,
};
use localfeat::io::{generate_synthetic_pair, rpc_file_name, ShapeKind};
use localfeat::nuisance::NuisanceKind;
use localfeat::{DescriptorKind, RigidTransform, Vec3};
use nalgebra::Matrix3;

#[test]
fn drifted_rotation_is_reorthonormalized() {
    let t = RigidTransform::from_rotation_axis_angle(
        &Vec3::new(0.3, -1.0, 0.4).normalize(),
        1.1,
        Vec3::new(1.0, 2.0, 3.0),
    );
    let mut m = *t.rotation();
    m[(0, 1)] += 1e-5;
    m[(2, 0)] -= 1e-5;
    let mut text = String::new();
    for r in 0..3 {
        text += &format!(
            "{} {} {} {}\n",
            m[(r, 0)],
            m[(r, 1)],
            m[(r, 2)],
            t.translation()[r]
        );
    }
    text += "0 0 0 1\n";
    let p = parse_pose(&text).unwrap();
    let r: &Matrix3<f64> = p.rotation();
    assert!((r.determinant() - 1.0).abs() <= 1e-9);
    assert!((r.transpose() * r - Matrix3::identity()).amax() <= 1e-9);
    assert!((r - t.rotation()).amax() <= 1e-4);

    m[(0, 1)] += 1e-3;
    let mut bad = String::new();
    for r in 0..3 {
        bad += &format!("{} {} {} 0\n", m[(r, 0)], m[(r, 1)], m[(r, 2)]);
    }
    bad += "0 0 0 1\n";
    assert!(parse_pose(&bad).is_err());
}

#[test]
fn files_roundtrip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let (s, _, x) = generate_synthetic_pair(&SyntheticShapeSpec::new(
        ShapeKind::Superellipsoid,
        700,
        2,
        3,
    ))
    .unwrap();
    let ply = dir.path().join("s.ply");
    write_ply(&s, &ply, PlyEncoding::BinaryLittleEndian).unwrap();
    let back = read_ply(&ply).unwrap();
    for (a, b) in s.points().iter().zip(back.points()) {
        assert_eq!(a.map(|v| v as f32 as f64), *b);
    }
    let pose = dir.path().join("pose.txt");
    write_pose(&x, &pose).unwrap();
    let y = read_pose(&pose).unwrap();
    assert!((y.to_matrix4() - x.to_matrix4()).amax() <= 1e-12);
    let z = parse_pose(&format_pose(&y)).unwrap();
    assert!((z.to_matrix4() - y.to_matrix4()).amax() <= 1e-12);
}

#[test]
fn manifest_run_writes_a_report_that_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (s, t, x) =
        generate_synthetic_pair(&SyntheticShapeSpec::new(ShapeKind::Heightfield, 1200, 6, 7))
            .unwrap();
    write_ply(&s, &d.join("a.ply"), PlyEncoding::BinaryLittleEndian).unwrap();
    write_ply(&t, &d.join("b.ply"), PlyEncoding::Ascii).unwrap();
    write_pose(&x, &d.join("ab.txt")).unwrap();
    let manifest = d.join("m.toml");
    std::fs::write(
        &manifest,
        r#"
schema_version = 1
name = "mixed"
conditions = ["baseline", "decimate-uniform=1/2"]

[[pair]]
name = "files"
source = "a.ply"
target = "b.ply"
pose = "ab.txt"

[[pair]]
name = "synthetic"
synthetic = { kind = "bumpy-sphere", points = 1200, seed = 8, pose_seed = 9 }
"#,
    )
    .unwrap();
    let m = load_manifest(&manifest).unwrap();
    let pairs: Vec<_> = (0..m.pairs.len())
        .map(|i| m.load_pair(i).unwrap())
        .collect();
    let conditions = m.expanded_conditions().unwrap();
    assert_eq!(
        conditions,
        vec![
            Condition::Baseline,
            Condition::nuisance(NuisanceKind::DecimateUniform, 0.5).unwrap()
        ]
    );
    let options = BenchOptions {
        n_keypoints: 80,
        ..BenchOptions::default()
    };
    let kinds = [DescriptorKind::Toldi, DescriptorKind::Rsm];
    let report = run_benchmark(&m.name, &pairs, &kinds, &conditions, &options).unwrap();

    let out = d.join("out");
    let written = write_report(&report, &out).unwrap();
    for f in [REPORT_CSV, TIMING_CSV, FAILURES_CSV, METADATA_FILE] {
        assert!(written.contains(&out.join(f)), "{f}");
    }
    let rows = read_report_csv(&out.join(REPORT_CSV)).unwrap();
    assert_eq!(rows.len(), report.cells.len());
    for (row, cell) in rows.iter().zip(&report.cells) {
        assert_eq!(row.kind, cell.kind.name());
        assert_eq!(row.condition, cell.condition.label());
        assert_eq!(row.level, cell.condition.level());
        assert!((row.auc - cell.auc).abs() <= 1e-9);
        assert_eq!(
            (row.bytes, row.n_corr, row.n_pairs),
            (cell.bytes, cell.n_corr, cell.n_pairs)
        );

        let curve: Vec<RpcRow> = read_csv(&out.join(RPC_DIR).join(rpc_file_name(cell))).unwrap();
        assert_eq!(curve.len(), cell.rpc.points.len());
        for (a, b) in curve.iter().zip(&cell.rpc.points) {
            assert!((a.tau - b.tau).abs() <= 1e-9);
            assert!((a.recall - b.recall).abs() <= 1e-9);
            assert!((a.one_minus_precision - b.one_minus_precision).abs() <= 1e-9);
        }
    }

    let merged =
        aggregate_reports(&[out.join(REPORT_CSV), out.join(REPORT_CSV)] as &[PathBuf]).unwrap();
    assert_eq!(merged.len(), rows.len());
    assert!(merged.iter().all(|r| r.n_pairs == 4));
}
