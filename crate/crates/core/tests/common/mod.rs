//! Independent reference implementations shared by the integration tests.
//!
//! Every oracle here is written from the definitions with plain loops and no
//! acceleration structure, so that it shares no code path with the library.
#![allow(dead_code)]

use std::f64::consts::PI;

use localfeat::bench::{compute_auc, match_features, tau_grid};
use localfeat::descriptors::describe_usc;
use localfeat::descriptors::stats::{central_moment, shannon_entropy, Grid};
use localfeat::io::{generate_shape, ShapeKind, SyntheticShapeSpec};
use localfeat::{
    canonical_lrf, compute_resolution, estimate_normals, extract_spherical_patch, transform_to_lrf,
    DescriptorKind, DescriptorParams, Feature, LocalPatch, PointCloud, SpatialIndex, Vec3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(n: usize, seed: u64, scale: f64) -> Vec<Vec3> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| Vec3::new(r.random::<f64>(), r.random::<f64>(), r.random::<f64>()) * scale)
        .collect()
}

/// Mean distance to the closest other point, by all-pairs scan.
pub fn brute_resolution(points: &[Vec3]) -> f64 {
    let mut total = 0.0;
    for (i, p) in points.iter().enumerate() {
        let mut best = f64::INFINITY;
        for (j, q) in points.iter().enumerate() {
            if i != j {
                best = best.min((p - q).norm());
            }
        }
        total += best;
    }
    total / points.len() as f64
}

/// Largest absolute resolution error over a few random clouds.
pub fn resolution_error() -> f64 {
    (0..3)
        .map(|seed| {
            let pts = random_points(1000, seed, 1.0);
            let cloud = PointCloud::new(pts.clone()).unwrap();
            (compute_resolution(&cloud).unwrap() - brute_resolution(&pts)).abs()
        })
        .fold(0.0, f64::max)
}

/// Radius, count and k-nearest queries checked against a linear scan;
/// returns the number of disagreeing queries.
pub fn index_mismatches() -> usize {
    let pts = random_points(2000, 11, 10.0);
    let index = SpatialIndex::build(&pts).unwrap();
    let mut bad = 0;
    let mut r = rng(12);
    for _ in 0..300 {
        let q = Vec3::new(
            r.random_range(-1.0..11.0),
            r.random_range(-1.0..11.0),
            r.random_range(-1.0..11.0),
        );
        let radius = r.random_range(0.0..2.5);
        let want: Vec<usize> = (0..pts.len())
            .filter(|&i| (pts[i] - q).norm() <= radius)
            .collect();
        if index.radius(&q, radius) != want || index.count_within(&q, radius) != want.len() {
            bad += 1;
        }

        let k = r.random_range(1..=25);
        let mut all: Vec<(f64, usize)> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| ((p - q).norm(), i))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let got = index.knn(&q, k);
        let same = got.len() == k
            && got
                .iter()
                .zip(&all)
                .all(|(g, w)| g.1 == w.0 && (g.0 == w.1 || (pts[g.0] - q).norm() == w.0));
        if !same || index.nearest(&q).1 != all[0].0 {
            bad += 1;
        }
    }
    bad
}

/// Random probability grid with some exact zeros.
pub fn random_grid(rows: usize, cols: usize, seed: u64) -> Grid {
    let mut r = rng(seed);
    let mut cells: Vec<f64> = (0..rows * cols)
        .map(|_| {
            if r.random::<f64>() < 0.2 {
                0.0
            } else {
                r.random::<f64>()
            }
        })
        .collect();
    let s: f64 = cells.iter().sum();
    cells.iter_mut().for_each(|c| *c /= s);
    Grid::from_cells(rows, cols, cells).unwrap()
}

pub fn direct_moment(g: &Grid, m: u32, n: u32) -> f64 {
    let (rows, cols) = (g.rows(), g.cols());
    let mut mass = 0.0;
    let mut ib = 0.0;
    let mut jb = 0.0;
    for a in 1..=rows {
        for b in 1..=cols {
            let w = g.get(a - 1, b - 1);
            mass += w;
            ib += a as f64 * w;
            jb += b as f64 * w;
        }
    }
    ib /= mass;
    jb /= mass;
    let mut mu = 0.0;
    for a in 1..=rows {
        for b in 1..=cols {
            let mut term = g.get(a - 1, b - 1);
            for _ in 0..m {
                term *= a as f64 - ib;
            }
            for _ in 0..n {
                term *= b as f64 - jb;
            }
            mu += term;
        }
    }
    mu
}

pub fn direct_entropy(g: &Grid) -> f64 {
    -g.cells()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

/// Largest moment or entropy error on random 15×15 grids.
pub fn moment_entropy_error() -> f64 {
    let mut worst = 0.0f64;
    for seed in 0..4 {
        let g = random_grid(15, 15, 100 + seed);
        for (m, n) in [
            (1, 1),
            (2, 1),
            (1, 2),
            (0, 2),
            (2, 0),
            (2, 2),
            (3, 1),
            (0, 3),
        ] {
            let got = central_moment(&g, m, n).unwrap();
            worst = worst.max((got - direct_moment(&g, m, n)).abs());
        }
        worst = worst.max((shannon_entropy(&g).unwrap() - direct_entropy(&g)).abs());
    }
    worst
}

/// The curve as a function of 1-precision: zero left of the first point,
/// linear between points, flat after the last.
fn curve_value(sorted: &[(f64, f64)], x: f64) -> f64 {
    if x < sorted[0].0 {
        return 0.0;
    }
    let last = sorted[sorted.len() - 1];
    if x >= last.0 {
        return last.1;
    }
    let i = sorted.partition_point(|p| p.0 <= x);
    let (a, b) = (sorted[i - 1], sorted[i]);
    a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
}

/// Midpoint Riemann sum of the curve over [0, 1].
pub fn riemann_auc(points: &[(f64, f64)], cells: usize) -> f64 {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let h = 1.0 / cells as f64;
    (0..cells)
        .map(|i| curve_value(&sorted, (i as f64 + 0.5) * h))
        .sum::<f64>()
        * h
}

/// Largest AUC error over random monotone curves.
pub fn auc_error() -> f64 {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    for _ in 0..6 {
        let n = r.random_range(2..40);
        let mut xs: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
        let mut ys: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        let pts: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
        worst = worst.max((compute_auc(&pts) - riemann_auc(&pts, 4_000_000)).abs());
    }
    worst
}

/// Local-frame spherical patches of a synthetic heightfield.
pub fn sample_patches(n: usize, radius_pr: f64, seed: u64) -> (Vec<LocalPatch>, f64) {
    let cloud = generate_shape(&SyntheticShapeSpec::new(
        ShapeKind::Heightfield,
        3000,
        seed,
        0,
    ))
    .unwrap();
    let cloud = estimate_normals(&cloud, 20).unwrap().cloud;
    let pr = cloud.resolution().unwrap();
    let index = cloud.build_index().unwrap();
    let mut r = rng(seed ^ 0x55);
    let mut out = Vec::new();
    while out.len() < n {
        let k = r.random_range(0..cloud.len());
        let world =
            extract_spherical_patch(&cloud, &index, &cloud.points()[k], radius_pr * pr).unwrap();
        if let Ok(lrf) = canonical_lrf(&world) {
            out.push(transform_to_lrf(&world, &lrf).unwrap());
        }
    }
    (out, pr)
}

/// The density-weighted shape context evaluated straight from its
/// definition.
pub fn direct_usc(patch: &LocalPatch, p: &DescriptorParams, pr: f64) -> Vec<f64> {
    let r = patch.support_radius;
    let (nj, nk, nl) = (p.usc_radial, p.usc_elevation, p.usc_azimuth);
    let r_min = p.usc_min_radius_ratio * r;
    let edges: Vec<f64> = (0..=nj)
        .map(|j| r_min * (r / r_min).powf(j as f64 / nj as f64))
        .collect();
    let mut hist = vec![0.0; nj * nk * nl];
    for q in &patch.points {
        let d = q.norm();
        if d < r_min || d > r {
            continue;
        }
        let j = (0..nj).rfind(|&j| d >= edges[j]).unwrap();
        let theta = (q.z / d).clamp(-1.0, 1.0).acos();
        let k = ((theta / (PI / nk as f64)) as usize).min(nk - 1);
        let phi = q.y.atan2(q.x).rem_euclid(2.0 * PI);
        let l = ((phi / (2.0 * PI / nl as f64)) as usize).min(nl - 1);
        let (t0, t1) = (k as f64 * PI / nk as f64, (k + 1) as f64 * PI / nk as f64);
        let (r0, r1) = (edges[j], if j + 1 == nj { r } else { edges[j + 1] });
        let volume =
            (r1.powi(3) - r0.powi(3)) / 3.0 * (t0.cos() - t1.cos()) * (2.0 * PI / nl as f64);
        let rho = patch
            .points
            .iter()
            .filter(|o| (*o - q).norm() <= p.usc_density_radius_pr * pr)
            .count()
            .max(1);
        hist[(j * nk + k) * nl + l] += 1.0 / (rho as f64 * volume.cbrt());
    }
    hist
}

/// Largest relative bin error of the library USC against [`direct_usc`].
/// The library stores single-precision values, so the comparison is made
/// against the oracle rounded the same way.
pub fn usc_error() -> f64 {
    let params = DescriptorParams::default();
    let (patches, pr) = sample_patches(10, 15.0, 21);
    let mut worst = 0.0f64;
    for patch in &patches {
        let got = describe_usc(patch, &params, pr).unwrap();
        let got = got.as_real().unwrap();
        let want = direct_usc(patch, &params, pr);
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            let w32 = *w as f32;
            let scale = w.abs().max(1e-300);
            worst = worst.max((*g as f64 - w32 as f64).abs() / scale);
        }
    }
    worst
}

/// Random real features with random target positions.
pub fn random_match_problem(n: usize, seed: u64) -> (Vec<Feature>, Vec<Feature>, Vec<Vec3>) {
    let mut r = rng(seed);
    let feat = |r: &mut ChaCha8Rng| {
        Feature::real(
            DescriptorKind::Shot,
            (0..8).map(|_| r.random::<f64>()).collect(),
        )
    };
    let source: Vec<Feature> = (0..n).map(|_| feat(&mut r)).collect();
    let target: Vec<Feature> = (0..n).map(|_| feat(&mut r)).collect();
    let positions = (0..n)
        .map(|_| Vec3::new(r.random_range(0.0..5.0), r.random_range(0.0..5.0), 0.0))
        .collect();
    (source, target, positions)
}

fn l2(a: &Feature, b: &Feature) -> f64 {
    let (a, b) = (a.as_real().unwrap(), b.as_real().unwrap());
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x as f64 - *y as f64).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Number of thresholds at which the library's match counts differ from a
/// brute-force recount on random features.
pub fn match_count_mismatches() -> usize {
    let (source, target, positions) = random_match_problem(50, 3);
    let inlier = 1.0;
    let taus = tau_grid(101).unwrap();
    let counts = match_features(&source, &target, &positions, inlier, &taus).unwrap();
    let mut bad = 0;
    for (c, &tau) in counts.iter().zip(&taus) {
        let (mut n_match, mut n_correct) = (0, 0);
        for (i, s) in source.iter().enumerate() {
            let mut d: Vec<(f64, usize)> = target
                .iter()
                .enumerate()
                .map(|(j, t)| (l2(s, t), j))
                .collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (d1, best) = d[0];
            let d2 = d[1].0;
            if d2 > 0.0 && (tau >= 1.0 || d1 / d2 < tau) {
                n_match += 1;
                if best == i || (positions[best] - positions[i]).norm() <= inlier {
                    n_correct += 1;
                }
            }
        }
        if c.n_corr != 50 || c.n_match != n_match || c.n_correct != n_correct {
            bad += 1;
        }
    }
    bad
}
