use rayon::prelude::*;

use super::check_distance;
use super::forest::ParentForest;
use crate::error::Result;
use crate::pointcloud::PointCloud;
use crate::spatial::KdTree3;

/// Non-random RAIN: every point links to the lowest point of its
/// neighborhood `N_d(p) = { q : |p - q| < d }`, itself included, with the
/// point index breaking ties in `z`.
pub fn rain_parents(cloud: &PointCloud, d: f64) -> Result<ParentForest> {
    check_distance(d)?;
    let index = KdTree3::build(cloud.positions_3d())?;
    Ok(rain_with_index(&index, d))
}

pub(crate) fn rain_with_index(index: &KdTree3, d: f64) -> ParentForest {
    let radius_sq = d * d;
    let parent = (0..index.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (index.point(i)[2], i);
            index.for_each_within(index.point(i), radius_sq, |j, _| {
                let cand = (index.point(j)[2], j);
                if cand.0 < best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                    best = cand;
                }
            });
            best.1 as u32
        })
        .collect();
    ParentForest::from_parents(parent)
}
