use rayon::prelude::*;

use super::check_distance;
use super::forest::ParentForest;
use crate::error::Result;
use crate::pointcloud::PointCloud;
use crate::spatial::KdTree3;

/// Z-Quickshift: Quickshift with density `-z`. Every point links to its
/// nearest strictly lower point within distance `d`; points without one are
/// modes.
pub fn zqs_parents(cloud: &PointCloud, d: f64) -> Result<ParentForest> {
    check_distance(d)?;
    let index = KdTree3::build(cloud.positions_3d())?;
    Ok(zqs_with_index(&index, d))
}

pub(crate) fn zqs_with_index(index: &KdTree3, d: f64) -> ParentForest {
    let radius_sq = d * d;
    let parent = (0..index.len())
        .into_par_iter()
        .map(|i| {
            let q = index.point(i);
            let z = q[2];
            index
                .nearest_where(q, Some(i), Some(radius_sq), |j| index.point(j)[2] < z)
                .map_or(i, |nb| nb.index) as u32
        })
        .collect();
    ParentForest::from_parents(parent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::forest_to_labels;
    use crate::pointcloud::Point3;

    fn cloud(pts: &[[f64; 3]]) -> PointCloud {
        PointCloud::new(pts.iter().map(|&p| Point3::from(p)).collect()).unwrap()
    }

    #[test]
    fn stacked_stem() {
        let c = cloud(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.5], [0.0, 0.0, 1.0]]);
        let f = zqs_parents(&c, 0.6).unwrap();
        assert_eq!(f.parents(), &[0, 0, 1]);
        assert_eq!(forest_to_labels(&f).unwrap().num_clusters(), 1);
    }

    #[test]
    fn links_to_nearest_lower() {
        let c = cloud(&[[0.0, 0.0, 0.0], [0.1, 0.0, 0.5], [0.0, 0.0, 0.9]]);
        let f = zqs_parents(&c, 1.2).unwrap();
        assert_eq!(f.parent(2), 1);
        assert_eq!(f.parent(1), 0);
    }

    #[test]
    fn flat_cloud_is_all_modes() {
        let c = cloud(&[[0.0, 0.0, 1.0], [0.1, 0.0, 1.0], [0.2, 0.0, 1.0]]);
        let f = zqs_parents(&c, 10.0).unwrap();
        assert_eq!(f.roots().count(), 3);
    }
}
