mod common;

use common::*;
use cropseg::cluster::{self as cl};
use cropseg::pointcloud::{load_ply, save_ply, PlyFormat};
use cropseg::{cluster, color_to_label, label_to_color, match_clusters, Labeling, Params, Point3, PointCloud};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Clouds on a coarse grid so that equal distances and heights are common.
fn grid_cloud(max: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((-12i32..12, -12i32..12, 0i32..10), 1..max).prop_map(|v| {
        let pts = v
            .into_iter()
            .map(|(x, y, z)| Point3::new(x as f64 * 0.125, y as f64 * 0.125, z as f64 * 0.125))
            .collect();
        PointCloud::new(pts).unwrap()
    })
}

fn finite_cloud(max: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3, -1e3f64..1e3), 0..max)
        .prop_map(|v| PointCloud::new(v.into_iter().map(|(x, y, z)| Point3::new(x, y, z)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rain_forest(cloud in grid_cloud(120), d in 0.05f64..1.5) {
        check_rain(&cloud, d).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn zqs_forest(cloud in grid_cloud(120), d in 0.05f64..1.5) {
        check_zqs(&cloud, d).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn gdqs_forest(cloud in grid_cloud(120), d in 0.05f64..1.5, k in 1usize..6) {
        prop_assume!(cloud.len() > k);
        let density = cl::knn_density_2d(&cloud, k).unwrap();
        let forest = cl::gdqs_parents(&cloud, d, &density).unwrap();
        check_forest(&forest).map_err(TestCaseError::fail)?;
        for (i, &p) in forest.parents().iter().enumerate() {
            let p = p as usize;
            prop_assert!(p == i || density.value(p) > density.value(i) || density.is_infinite(p));
        }
    }

    #[test]
    fn gdqspp_partition(cloud in grid_cloud(120), k in 1usize..8, beta in 0.0f64..=1.0) {
        prop_assume!(cloud.len() > k);
        let labels = cluster(&cloud, &Params::gdqspp(k, beta).unwrap()).unwrap();
        prop_assert_eq!(labels.len(), cloud.len());
        let m = labels.num_clusters() as u32;
        prop_assert!(labels.as_slice().iter().all(|&l| (1..=m).contains(&l)));

        let density = cl::knn_density_2d(&cloud, k).unwrap();
        let cores = cl::extract_cores(&cloud, &density, k, beta).unwrap();
        prop_assert_eq!(cores.len(), labels.num_clusters());
        // Every core lands in its own cluster.
        let mut seen = std::collections::HashSet::new();
        for core in cores.cores() {
            let l = labels.as_slice()[core.members[0] as usize];
            prop_assert!(core.members.iter().all(|&p| labels.as_slice()[p as usize] == l));
            prop_assert!(seen.insert(l));
        }
    }

    #[test]
    fn power_of_two_scaling(cloud in grid_cloud(100), e in -8i32..10, k in 1usize..6) {
        prop_assume!(cloud.len() > k);
        let params = Params::gdqspp(k, 0.3).unwrap();
        let base = cluster(&cloud, &params).unwrap();
        let scaled = cluster(&cloud.scaled(2f64.powi(e)).unwrap(), &params).unwrap();
        prop_assert_eq!(base, scaled);
    }

    #[test]
    fn grid_translation(cloud in grid_cloud(100), dx in -40i32..40, dy in -40i32..40, dz in -40i32..40) {
        prop_assume!(cloud.len() > 3);
        let moved = cloud
            .map_points(|p| Point3::new(p.x + dx as f64, p.y + dy as f64, p.z + dz as f64))
            .unwrap();
        for params in [Params::gdqspp(3, 0.3).unwrap(), Params::rain(0.4).unwrap(), Params::zqs(0.4).unwrap()] {
            prop_assert_eq!(cluster(&cloud, &params).unwrap(), cluster(&moved, &params).unwrap());
        }
    }

    #[test]
    fn quarter_turn(cloud in grid_cloud(100)) {
        // Swapping x and y and negating one is exact, so labels must agree.
        prop_assume!(cloud.len() > 3);
        let turned = cloud.map_points(|p| Point3::new(-p.y, p.x, p.z)).unwrap();
        for params in [Params::gdqspp(3, 0.3).unwrap(), Params::gdqs(0.3, 3).unwrap(), Params::zqs(0.4).unwrap()] {
            prop_assert_eq!(cluster(&cloud, &params).unwrap(), cluster(&turned, &params).unwrap());
        }
    }

    #[test]
    fn assignment_matches_brute_force(rows in 0usize..=7, cols in 0usize..=7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_weights(&mut rng, rows, cols);
        check_assignment(&w).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn matching_is_symmetric(a in prop::collection::vec(1u32..6, 1..60), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<u32> = a.iter().map(|&x| if rng.random_bool(0.3) { rng.random_range(1..6) } else { x }).collect();
        let (la, lb) = (Labeling::new(a), Labeling::new(b));
        let ab = match_clusters(&la, &lb, false).unwrap();
        let ba = match_clusters(&lb, &la, false).unwrap();
        prop_assert!((ab.iou_sum() - ba.iou_sum()).abs() < 1e-12);
        prop_assert_eq!(ab.pairs.len(), ba.pairs.len());
        let self_match = match_clusters(&la, &la, false).unwrap();
        prop_assert_eq!(self_match.mean_iou, 1.0);
    }

    #[test]
    fn palette_round_trip(label in 0u32..(1 << 24)) {
        let color = label_to_color(label).unwrap();
        prop_assert_eq!(color_to_label(color), label);
        prop_assert_eq!(color == [0, 0, 0], label == 0);
    }

    #[test]
    fn ply_round_trip(cloud in finite_cloud(60), labels in prop::collection::vec(0u32..50, 60)) {
        let dir = tempfile::tempdir().unwrap();
        let labeling = Labeling::new(labels[..cloud.len()].to_vec());
        for (format, tol) in [(PlyFormat::Ascii, 1e-6), (PlyFormat::BinaryLittleEndian, 0.0)] {
            let path = dir.path().join("cloud.ply");
            save_ply(&cloud, &labeling, &path, format).unwrap();
            let back = load_ply(&path).unwrap();
            prop_assert_eq!(back.len(), cloud.len());
            for (p, q) in cloud.points().iter().zip(back.points()) {
                for (a, b) in p.xyz().into_iter().zip(q.xyz()) {
                    prop_assert!((a - b).abs() <= tol * a.abs().max(1.0), "{} vs {}", a, b);
                }
            }
            prop_assert_eq!(back.labels().unwrap(), labeling.as_slice());
        }
    }
}
