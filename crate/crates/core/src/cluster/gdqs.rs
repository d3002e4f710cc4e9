use rayon::prelude::*;

use super::check_distance;
use super::density::DensityField;
use super::forest::ParentForest;
use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;
use crate::spatial::KdTree2;

/// GD Quickshift: standard Quickshift on the ground-plane projection. Every
/// point links to its nearest strictly denser projected point within `d`.
pub fn gdqs_parents(cloud: &PointCloud, d: f64, density: &DensityField) -> Result<ParentForest> {
    check_distance(d)?;
    if density.len() != cloud.len() {
        return Err(Error::Contract(format!(
            "density has {} values for {} points",
            density.len(),
            cloud.len()
        )));
    }
    let index = KdTree2::build(cloud.positions_2d())?;
    Ok(gdqs_with_index(&index, d, density))
}

pub(crate) fn gdqs_with_index(index: &KdTree2, d: f64, density: &DensityField) -> ParentForest {
    let radius_sq = d * d;
    let parent = (0..index.len())
        .into_par_iter()
        .map(|i| {
            index
                .nearest_where(index.point(i), Some(i), Some(radius_sq), |j| {
                    density.strictly_denser_value(j, i)
                })
                .map_or(i, |nb| nb.index) as u32
        })
        .collect();
    ParentForest::from_parents(parent)
}
