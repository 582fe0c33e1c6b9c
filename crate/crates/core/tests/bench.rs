mod common;

use localfeat::bench::{
    compute_clutter_occlusion, compute_overlap, compute_rpc, keypoint_seed, match_features,
    nuisance_seed, run_benchmark, sample_correspondences, sample_keypoints, tau_grid,
    time_descriptors, BenchOptions, BenchPair, Condition, TimingPatchSet,
};
use localfeat::io::{generate_synthetic_pair, ShapeKind, SyntheticShapeSpec};
use localfeat::nuisance::{add_gaussian_noise, NuisanceKind};
use localfeat::{
    canonical_lrf, describe, estimate_normals, extract_spherical_patch, propagate_lrf,
    transform_to_lrf, DescriptorKind, DescriptorParams, PointCloud, RigidTransform, Vec3,
};
use rand::Rng;

/// Jittered unit-spaced planar grid with columns `x0..x0 + cols`.
fn strip(cols: usize, rows: usize, x0: f64, seed: u64) -> PointCloud {
    let mut r = common::rng(seed);
    let pts = (0..cols * rows)
        .map(|i| {
            let (c, k) = (i % cols, i / cols);
            Vec3::new(
                x0 + c as f64 + r.random_range(-0.05..0.05),
                k as f64 + r.random_range(-0.05..0.05),
                0.0,
            )
        })
        .collect();
    PointCloud::new(pts).unwrap()
}

fn pose() -> RigidTransform {
    RigidTransform::from_rotation_axis_angle(
        &Vec3::new(1.0, 2.0, 3.0).normalize(),
        0.7,
        Vec3::new(5.0, -3.0, 2.0),
    )
}

fn moved(cloud: &PointCloud, t: &RigidTransform) -> PointCloud {
    cloud.map_points(|p| t.apply(p)).unwrap()
}

#[test]
fn half_overlap_survivors_and_overlap_ratio() {
    let t = pose();
    let source = strip(200, 20, 0.0, 1);
    let target = moved(&strip(200, 20, 100.0, 2), &t);
    let pr = source.resolution().unwrap();

    let overlap = compute_overlap(&source, &target, &t, None).unwrap();
    assert!((overlap - 0.5).abs() <= 0.02, "overlap {overlap}");

    let set = sample_correspondences(&source, &target, &t, 1000, 5, 2.0 * pr).unwrap();
    let fraction = set.len() as f64 / 1000.0;
    assert!(set.is_short());
    assert!((fraction - 0.5).abs() <= 0.05, "survivors {fraction}");
}

#[test]
fn clutter_from_a_disjoint_distractor() {
    let t = pose();
    let source = strip(100, 20, 0.0, 3);
    let mut pts: Vec<Vec3> = moved(&source, &t).points().to_vec();
    pts.extend(
        moved(&strip(100, 20, 0.0, 4), &t)
            .points()
            .iter()
            .map(|p| p + Vec3::new(0.0, 0.0, 500.0)),
    );
    let target = PointCloud::new(pts).unwrap();
    let (clutter, occlusion) = compute_clutter_occlusion(&source, &target, &t, None).unwrap();
    assert!((clutter - 0.5).abs() <= 0.02, "clutter {clutter}");
    assert!(occlusion.abs() <= 1e-12);
}

#[test]
fn occlusion_from_a_half_target() {
    let t = pose();
    let source = strip(200, 20, 0.0, 5);
    let keep: Vec<usize> = (0..source.len())
        .filter(|&i| source.points()[i].x >= 100.0)
        .collect();
    let target = moved(&source.select(&keep), &t);
    let (clutter, occlusion) = compute_clutter_occlusion(&source, &target, &t, None).unwrap();
    assert!((occlusion - 0.5).abs() <= 0.02, "occlusion {occlusion}");
    assert!(clutter.abs() <= 1e-12);
}

#[test]
fn overlap_is_symmetric_under_inverse_pose() {
    let t = pose();
    let source = strip(150, 20, 0.0, 6);
    let target = moved(&strip(150, 20, 60.0, 7), &t);
    let a = compute_overlap(&source, &target, &t, Some(2.0)).unwrap();
    let b = compute_overlap(&target, &source, &t.inverse(), Some(2.0)).unwrap();
    assert!((a - b).abs() <= 0.02, "{a} vs {b}");
}

#[test]
fn synthetic_pairs_overlap_fully() {
    for kind in ShapeKind::ALL {
        let (s, t, x) =
            generate_synthetic_pair(&SyntheticShapeSpec::new(kind, 1500, 8, 9)).unwrap();
        assert_eq!(compute_overlap(&s, &t, &x, None).unwrap(), 1.0, "{kind}");
    }
}

fn bench_pairs() -> Vec<BenchPair> {
    [(ShapeKind::Heightfield, 31), (ShapeKind::BumpySphere, 32)]
        .into_iter()
        .map(|(kind, seed)| {
            let (source, target, transform) =
                generate_synthetic_pair(&SyntheticShapeSpec::new(kind, 1500, seed, seed + 100))
                    .unwrap();
            BenchPair {
                name: kind.to_string(),
                source,
                target,
                transform,
                labels: Default::default(),
            }
        })
        .collect()
}

/// One pair run rebuilt from the standalone operations.
fn recompute_auc(
    pair: &BenchPair,
    pi: usize,
    kind: DescriptorKind,
    condition: &Condition,
    o: &BenchOptions,
) -> f64 {
    let source = estimate_normals(&pair.source, o.normal_k).unwrap().cloud;
    let pr = pair.source.resolution().unwrap();
    let r = o.radius_pr * pr;
    let target = match condition {
        Condition::Baseline => pair.target.clone(),
        Condition::Nuisance {
            kind: NuisanceKind::GaussianNoise,
            level,
        } => add_gaussian_noise(&pair.target, *level, pr, nuisance_seed(o.seed, pi, 0)).unwrap(),
        other => panic!("not covered: {other}"),
    };
    let target = estimate_normals(&target, o.normal_k).unwrap().cloud;
    let (si, ti) = (source.build_index().unwrap(), target.build_index().unwrap());
    let params = DescriptorParams::default();

    let (mut src, mut tgt, mut pos) = (Vec::new(), Vec::new(), Vec::new());
    for k in sample_keypoints(&source, o.n_keypoints, keypoint_seed(o.seed, pi)) {
        let p = source.points()[k];
        let world = extract_spherical_patch(&source, &si, &p, r).unwrap();
        let Ok(lrf) = canonical_lrf(&world) else {
            continue;
        };
        let (t, d) = ti.nearest(&pair.transform.apply(&p));
        if d > o.inlier_radius_pr * pr {
            continue;
        }
        let tp = target.points()[t];
        let local = transform_to_lrf(&world, &lrf).unwrap();
        src.push(describe(kind, &local, &params, pr).unwrap().feature);
        let tlrf = propagate_lrf(&lrf, &pair.transform).with_origin(tp);
        let tworld = extract_spherical_patch(&target, &ti, &tp, r).unwrap();
        tgt.push(
            describe(
                kind,
                &transform_to_lrf(&tworld, &tlrf).unwrap(),
                &params,
                pr,
            )
            .unwrap()
            .feature,
        );
        pos.push(tp);
    }
    let taus = tau_grid(o.tau_steps).unwrap();
    let counts = match_features(&src, &tgt, &pos, o.inlier_radius_pr * pr, &taus).unwrap();
    compute_rpc(&counts).unwrap().auc
}

#[test]
fn report_cells_match_recomputation_and_repeat_exactly() {
    let pairs = bench_pairs();
    let kinds = [
        DescriptorKind::Shot,
        DescriptorKind::Lovs,
        DescriptorKind::Rcs,
    ];
    let conditions = [
        Condition::Baseline,
        Condition::nuisance(NuisanceKind::GaussianNoise, 0.5).unwrap(),
    ];
    let options = BenchOptions {
        seed: 17,
        n_keypoints: 120,
        ..BenchOptions::default()
    };
    let report = run_benchmark("oracle", &pairs, &kinds, &conditions, &options).unwrap();
    assert!(report.failures.is_empty());
    assert_eq!(report.cells.len(), kinds.len() * conditions.len());
    for condition in &conditions {
        for &kind in &kinds {
            let cell = report.cell(kind, condition).unwrap();
            assert_eq!(cell.n_pairs, 2);
            let want: f64 = (0..pairs.len())
                .map(|pi| recompute_auc(&pairs[pi], pi, kind, condition, &options))
                .sum::<f64>()
                / 2.0;
            assert!(
                (cell.auc - want).abs() <= 1e-12,
                "{kind} {condition}: {} vs {want}",
                cell.auc
            );
            assert_eq!(cell.bytes, kind.payload_bytes(&DescriptorParams::default()));
        }
    }

    let again = run_benchmark("oracle", &pairs, &kinds, &conditions, &options).unwrap();
    for (a, b) in report.cells.iter().zip(&again.cells) {
        assert_eq!(a.auc.to_bits(), b.auc.to_bits());
        assert_eq!(a.rpc, b.rpc);
        assert_eq!(a.n_corr, b.n_corr);
    }
}

#[test]
fn empty_condition_list_runs_the_baseline() {
    let pairs = bench_pairs();
    let options = BenchOptions {
        n_keypoints: 60,
        ..BenchOptions::default()
    };
    let report = run_benchmark("b", &pairs[..1], &[DescriptorKind::Rsm], &[], &options).unwrap();
    assert_eq!(report.conditions, vec![Condition::Baseline]);
    assert_eq!(report.cells.len(), 1);
}

#[test]
fn failing_pairs_are_recorded_not_fatal() {
    let mut pairs = bench_pairs();
    // A pose that sends the source far from its target leaves no correspondence.
    pairs[1].transform =
        RigidTransform::from_rotation_axis_angle(&Vec3::z(), 0.0, Vec3::new(1e6, 0.0, 0.0));
    let options = BenchOptions {
        n_keypoints: 60,
        ..BenchOptions::default()
    };
    let report = run_benchmark(
        "f",
        &pairs,
        &[DescriptorKind::Shot],
        &[Condition::Baseline],
        &options,
    )
    .unwrap();
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].pair, pairs[1].name);
    assert_eq!(report.cells[0].n_pairs, 1);
}

#[test]
fn usc_time_grows_with_patch_size() {
    let (patches, pr) = common::sample_patches(30, 15.0, 41);
    // Thin each patch to a quarter and a half of its points.
    let thin = |step: usize| TimingPatchSet {
        radius_pr: 15.0,
        patches: patches
            .iter()
            .map(|p| {
                let mut q = p.clone();
                let keep: Vec<usize> = (0..p.len()).step_by(step).collect();
                q.points = keep.iter().map(|&i| p.points[i]).collect();
                q.normals = p
                    .normals
                    .as_ref()
                    .map(|n| keep.iter().map(|&i| n[i]).collect());
                q.indices = keep.iter().map(|&i| p.indices[i]).collect();
                q
            })
            .collect(),
    };
    let sets = [thin(4), thin(2), thin(1)];
    let params = DescriptorParams::default();
    let median_of_runs = |set: &TimingPatchSet| {
        let mut runs: Vec<f64> = (0..5)
            .map(|_| {
                time_descriptors(
                    std::slice::from_ref(set),
                    &[DescriptorKind::Usc],
                    &params,
                    pr,
                    2,
                )
                .unwrap()[0]
                    .median_ms
            })
            .collect();
        runs.sort_by(f64::total_cmp);
        runs[2]
    };
    let times: Vec<f64> = sets.iter().map(median_of_runs).collect();
    assert!(times[0] <= times[1] && times[1] <= times[2], "{times:?}");
}
