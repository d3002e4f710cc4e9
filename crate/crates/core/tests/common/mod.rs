//! Brute-force reference implementations and random inputs shared by the
//! integration tests. Everything here scans all pairs and shares no code
//! with the library beyond its data types.

#![allow(dead_code)]

use std::collections::HashMap;

use cropseg::cluster::{self as cl, Core};
use cropseg::{Labeling, Point3, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn d2_3(a: &Point3, b: &Point3) -> f64 {
    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
    dx * dx + dy * dy + dz * dz
}

pub fn d2_2(a: &Point3, b: &Point3) -> f64 {
    let (dx, dy) = (a.x - b.x, a.y - b.y);
    dx * dx + dy * dy
}

/// Labels from a parent array: follow parents to a root, then number roots
/// by first appearance.
pub fn labels_from_parents(parent: &[usize]) -> Labeling {
    let root = |mut i: usize| {
        let mut steps = 0;
        while parent[i] != i {
            i = parent[i];
            steps += 1;
            assert!(steps <= parent.len(), "cycle in parent array");
        }
        i
    };
    let mut ids = HashMap::new();
    let labels = (0..parent.len())
        .map(|i| {
            let next = ids.len() as u32 + 1;
            *ids.entry(root(i)).or_insert(next)
        })
        .collect();
    Labeling::new(labels)
}

pub fn rain(pts: &[Point3], d: f64) -> Vec<usize> {
    (0..pts.len())
        .map(|i| {
            (0..pts.len())
                .filter(|&j| d2_3(&pts[i], &pts[j]) < d * d)
                .min_by(|&a, &b| pts[a].z.total_cmp(&pts[b].z).then(a.cmp(&b)))
                .unwrap()
        })
        .collect()
}

pub fn zqs(pts: &[Point3], d: f64) -> Vec<usize> {
    (0..pts.len())
        .map(|i| {
            (0..pts.len())
                .filter(|&j| pts[j].z < pts[i].z && d2_3(&pts[i], &pts[j]) < d * d)
                .min_by(|&a, &b| {
                    d2_3(&pts[i], &pts[a])
                        .total_cmp(&d2_3(&pts[i], &pts[b]))
                        .then(a.cmp(&b))
                })
                .unwrap_or(i)
        })
        .collect()
}

/// Sorted `(squared distance, index)` lists of every point's `k` nearest
/// other points in the ground plane.
pub fn knn_2d(pts: &[Point3], k: usize) -> Vec<Vec<(f64, usize)>> {
    (0..pts.len())
        .map(|i| {
            let mut all: Vec<(f64, usize)> = (0..pts.len())
                .filter(|&j| j != i)
                .map(|j| (d2_2(&pts[i], &pts[j]), j))
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            all.truncate(k);
            all
        })
        .collect()
}

/// Squared k-NN radius per point.
pub fn radius_sq(knn: &[Vec<(f64, usize)>]) -> Vec<f64> {
    knn.iter().map(|l| l.last().unwrap().0).collect()
}

/// `key(i) > key(j)` with key `(1 / r2, -index)`.
pub fn denser(r2: &[f64], i: usize, j: usize) -> bool {
    r2[i] < r2[j] || (r2[i] == r2[j] && i < j)
}

/// Decreasing key order.
fn key_order(r2: &[f64], a: usize, b: usize) -> std::cmp::Ordering {
    r2[a].total_cmp(&r2[b]).then(a.cmp(&b))
}

pub fn gdqs(pts: &[Point3], d: f64, r2: &[f64]) -> Vec<usize> {
    let strictly = |j: usize, i: usize| r2[j] < r2[i] || (r2[j] == 0.0 && r2[i] == 0.0 && j < i);
    (0..pts.len())
        .map(|i| {
            (0..pts.len())
                .filter(|&j| j != i && strictly(j, i) && d2_2(&pts[i], &pts[j]) < d * d)
                .min_by(|&a, &b| {
                    d2_2(&pts[i], &pts[a])
                        .total_cmp(&d2_2(&pts[i], &pts[b]))
                        .then(a.cmp(&b))
                })
                .unwrap_or(i)
        })
        .collect()
}

/// Lock test in squared-radius form, `r_mode^2 < (1 - beta) r_level^2`; the
/// density form rounds differently when the ratio is hit exactly.
fn locks(mode_r2: f64, level_r2: f64, beta: f64) -> bool {
    if mode_r2 == 0.0 {
        return beta == 0.0 || (beta < 1.0 && level_r2 != 0.0);
    }
    mode_r2 < (1.0 - beta) * level_r2
}

/// Core extraction by relabeling whole components on every merge.
pub fn cores(knn: &[Vec<(f64, usize)>], beta: f64) -> Vec<Core> {
    let n = knn.len();
    let r2 = radius_sq(knn);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key_order(&r2, a, b));
    let is_neighbor = |i: usize, j: usize| knn[i].iter().any(|&(_, x)| x == j);

    const NONE: usize = usize::MAX;
    let mut comp = vec![NONE; n];
    // Per component id: mode, locked, members while unlocked.
    let mut mode: Vec<usize> = Vec::new();
    let mut locked: Vec<bool> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    let mut out = Vec::new();
    let snapshot = |c: usize, comp: &[usize], mode: &[usize]| Core {
        mode: mode[c],
        mode_density: 1.0 / r2[mode[c]],
        members: (0..n).filter(|&i| comp[i] == c).map(|i| i as u32).collect(),
    };

    for &p in &order {
        for c in 0..mode.len() {
            if alive[c] && !locked[c] && locks(r2[mode[c]], r2[p], beta) {
                locked[c] = true;
                out.push(snapshot(c, &comp, &mode));
            }
        }
        let c = mode.len();
        mode.push(p);
        locked.push(false);
        alive.push(true);
        comp[p] = c;
        for j in 0..n {
            if comp[j] == NONE || j == p || !(is_neighbor(p, j) && is_neighbor(j, p)) {
                continue;
            }
            let (a, b) = (comp[p], comp[j]);
            if a == b {
                continue;
            }
            let keep = if denser(&r2, mode[a], mode[b]) { a } else { b };
            let gone = a + b - keep;
            locked[keep] = locked[a] || locked[b];
            alive[gone] = false;
            for x in comp.iter_mut() {
                if *x == gone {
                    *x = keep;
                }
            }
        }
    }
    for c in 0..mode.len() {
        if alive[c] && !locked[c] {
            out.push(snapshot(c, &comp, &mode));
        }
    }
    out.sort_by(|a, b| key_order(&r2, a.mode, b.mode));
    out
}

/// GD Quickshift++ labels from cores: each non-core point follows its nearest
/// 3D point of higher key until it reaches a core.
pub fn gdqspp(pts: &[Point3], r2: &[f64], cores: &[Core]) -> Labeling {
    let n = pts.len();
    let mut core_of = vec![None; n];
    for (c, core) in cores.iter().enumerate() {
        for &m in &core.members {
            assert!(core_of[m as usize].is_none());
            core_of[m as usize] = Some(c as u32);
        }
    }
    let parent: Vec<Option<usize>> = (0..n)
        .map(|i| {
            (0..n).filter(|&j| denser(r2, j, i)).min_by(|&a, &b| {
                d2_3(&pts[i], &pts[a])
                    .total_cmp(&d2_3(&pts[i], &pts[b]))
                    .then(a.cmp(&b))
            })
        })
        .collect();
    let labels = (0..n)
        .map(|mut i| loop {
            if let Some(c) = core_of[i] {
                break c + 1;
            }
            i = parent[i].expect("climb ended outside the cores");
        })
        .collect();
    Labeling::new(labels).renumbered()
}

/// Brute-force maximum total weight over all partial one-to-one matchings.
pub fn best_matching_sum(w: &[Vec<f64>]) -> f64 {
    fn go(w: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
        if row == w.len() {
            return 0.0;
        }
        let mut best = go(w, row + 1, used);
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                best = best.max(w[row][c] + go(w, row + 1, used));
                used[c] = false;
            }
        }
        best
    }
    let cols = w.first().map_or(0, Vec::len);
    go(w, 0, &mut vec![false; cols])
}

/// Clumps of points with stems (repeated ground positions) and coordinates
/// snapped to a coarse grid, so distance and density ties are common.
pub fn random_cloud(n: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clumps = 1 + n / 100;
    let centers: Vec<[f64; 2]> = (0..clumps)
        .map(|_| [rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)])
        .collect();
    let snap = |v: f64| (v * 64.0).round() / 64.0;
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let c = centers[rng.random_range(0..clumps)];
        let p = match rng.random_range(0..10) {
            // Stem: exact center, random height.
            0..=2 => Point3::new(c[0], c[1], snap(rng.random_range(0.0..1.0))),
            // Leaf-like spread around the clump.
            3..=8 => Point3::new(
                snap(c[0] + rng.random_range(-0.6..0.6)),
                snap(c[1] + rng.random_range(-0.6..0.6)),
                snap(rng.random_range(0.0..1.2)),
            ),
            // Exact duplicate of an earlier point.
            _ if !pts.is_empty() => pts[rng.random_range(0..pts.len())],
            _ => Point3::new(c[0], c[1], 0.0),
        };
        pts.push(p);
    }
    PointCloud::new(pts).unwrap()
}

/// Runs all four algorithms through the library and the brute-force
/// references on one cloud; returns a description of the first mismatch.
pub fn compare_with_oracle(cloud: &PointCloud, d: f64, k: usize, beta: f64) -> Result<(), String> {
    let pts = cloud.points();
    let check = |what: &str, ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(format!("{what} differs (n = {})", pts.len()))
        }
    };

    let fast = cl::rain_parents(cloud, d).unwrap();
    let slow = rain(pts, d);
    check(
        "rain parents",
        fast.parents().iter().map(|&p| p as usize).eq(slow.iter().copied()),
    )?;
    check(
        "rain labels",
        cl::forest_to_labels(&fast).unwrap() == labels_from_parents(&slow),
    )?;

    let fast = cl::zqs_parents(cloud, d).unwrap();
    let slow = zqs(pts, d);
    check(
        "zqs parents",
        fast.parents().iter().map(|&p| p as usize).eq(slow.iter().copied()),
    )?;
    check(
        "zqs labels",
        cl::forest_to_labels(&fast).unwrap() == labels_from_parents(&slow),
    )?;

    let knn = knn_2d(pts, k);
    let r2 = radius_sq(&knn);
    let density = cl::knn_density_2d(cloud, k).unwrap();
    check(
        "k-NN radius",
        (0..pts.len()).all(|i| density.radius_sq(i) == r2[i] && density.kth_neighbor(i).index == knn[i][k - 1].1),
    )?;

    let fast = cl::gdqs_parents(cloud, d, &density).unwrap();
    let slow = gdqs(pts, d, &r2);
    check(
        "gdqs parents",
        fast.parents().iter().map(|&p| p as usize).eq(slow.iter().copied()),
    )?;

    let fast_cores = cl::extract_cores(cloud, &density, k, beta).unwrap();
    let slow_cores = cores(&knn, beta);
    check("cores", fast_cores.cores() == slow_cores.as_slice())?;

    let fast = cl::gdqspp_assign(cloud, &density, &fast_cores).unwrap();
    check("gdqspp labels", fast == gdqspp(pts, &r2, &slow_cores))?;
    let params = cropseg::Params::gdqspp(k, beta).unwrap();
    check("gdqspp dispatch", cropseg::cluster(cloud, &params).unwrap() == fast)
}

/// Parent forest checks shared by every forest algorithm: parents in range,
/// no cycles, and labels that cover every point with ids 1..=roots.
pub fn check_forest(forest: &cl::ParentForest) -> Result<(), String> {
    let parent: Vec<usize> = forest.parents().iter().map(|&p| p as usize).collect();
    let n = parent.len();
    for start in 0..n {
        let (mut i, mut steps) = (start, 0);
        while parent[i] != i {
            i = parent[i];
            steps += 1;
            if steps > n {
                return Err(format!("cycle through point {start}"));
            }
        }
    }
    let labels = cl::forest_to_labels(forest).map_err(|e| e.to_string())?;
    let roots = (0..n).filter(|&i| parent[i] == i).count();
    if labels.len() != n || labels.num_clusters() != roots {
        return Err(format!(
            "{} labels in {} clusters for {n} points, {roots} roots",
            labels.len(),
            labels.num_clusters()
        ));
    }
    if labels.as_slice().iter().any(|&l| l == 0 || l as usize > roots) {
        return Err("labels outside 1..=roots".into());
    }
    Ok(())
}

/// RAIN parents never sit higher than their children and are the lowest
/// point of the neighborhood.
pub fn check_rain(cloud: &PointCloud, d: f64) -> Result<(), String> {
    let forest = cl::rain_parents(cloud, d).map_err(|e| e.to_string())?;
    check_forest(&forest)?;
    let pts = cloud.points();
    for (i, &p) in forest.parents().iter().enumerate() {
        let p = p as usize;
        if pts[p].z > pts[i].z || d2_3(&pts[i], &pts[p]) >= d * d {
            return Err(format!("rain parent {p} of {i} is higher or too far"));
        }
        if let Some(j) = (0..pts.len()).find(|&j| d2_3(&pts[i], &pts[j]) < d * d && pts[j].z < pts[p].z) {
            return Err(format!("point {j} is lower than the rain parent of {i}"));
        }
    }
    Ok(())
}

/// Z-Quickshift parents are strictly lower and no strictly lower point within
/// `d` is closer.
pub fn check_zqs(cloud: &PointCloud, d: f64) -> Result<(), String> {
    let forest = cl::zqs_parents(cloud, d).map_err(|e| e.to_string())?;
    check_forest(&forest)?;
    let pts = cloud.points();
    for (i, &p) in forest.parents().iter().enumerate() {
        let p = p as usize;
        let lower = |j: usize| pts[j].z < pts[i].z && d2_3(&pts[i], &pts[j]) < d * d;
        if p == i {
            if let Some(j) = (0..pts.len()).find(|&j| lower(j)) {
                return Err(format!("root {i} has lower neighbor {j}"));
            }
            continue;
        }
        if !lower(p) {
            return Err(format!("zqs parent {p} of {i} is not a lower neighbor"));
        }
        let dp = d2_3(&pts[i], &pts[p]);
        if let Some(j) = (0..pts.len()).find(|&j| lower(j) && d2_3(&pts[i], &pts[j]) < dp) {
            return Err(format!("lower point {j} is closer to {i} than its parent"));
        }
    }
    Ok(())
}

/// A random `rows x cols` weight matrix in [0, 1) with some exact zeros.
pub fn random_weights(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.random_bool(0.2) {
                        0.0
                    } else {
                        rng.random_range(0.0..1.0)
                    }
                })
                .collect()
        })
        .collect()
}

/// The assignment is one-to-one and reaches the brute-force optimum.
pub fn check_assignment(w: &[Vec<f64>]) -> Result<(), String> {
    let a = cropseg::eval::max_weight_assignment(w);
    if a.len() != w.len() {
        return Err("one entry per row expected".into());
    }
    let cols: Vec<usize> = a.iter().flatten().copied().collect();
    let mut uniq = cols.clone();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() != cols.len() {
        return Err("a column is assigned twice".into());
    }
    let got: f64 = a.iter().enumerate().filter_map(|(i, c)| c.map(|c| w[i][c])).sum();
    let best = best_matching_sum(w);
    if (got - best).abs() > 1e-9 {
        return Err(format!("assignment sums to {got}, optimum is {best}"));
    }
    Ok(())
}
