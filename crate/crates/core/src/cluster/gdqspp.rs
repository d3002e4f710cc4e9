use rayon::prelude::*;

use super::cores::CoreSet;
use super::density::DensityField;
use crate::error::{Error, Result};
use crate::pointcloud::{Labeling, PointCloud};
use crate::spatial::KdTree3;

/// GD Quickshift++ assignment: core points take their core's label; every
/// other point climbs to its nearest strictly denser point in 3D (no
/// distance limit) until it reaches a core.
pub fn gdqspp_assign(cloud: &PointCloud, density: &DensityField, cores: &CoreSet) -> Result<Labeling> {
    let n = cloud.len();
    if density.len() != n {
        return Err(Error::Contract(format!(
            "density has {} values for {n} points",
            density.len()
        )));
    }
    if n == 0 {
        return Ok(Labeling::default());
    }
    if cores.is_empty() {
        return Err(Error::Contract("no cluster cores for a non-empty cloud".into()));
    }
    let core_of = cores.membership(n)?;
    let index = KdTree3::build(cloud.positions_3d())?;
    assign_with_index(&index, density, &core_of)
}

pub(crate) fn assign_with_index(index: &KdTree3, density: &DensityField, core_of: &[Option<u32>]) -> Result<Labeling> {
    let parent: Vec<Option<u32>> = (0..index.len())
        .into_par_iter()
        .map(|i| {
            if core_of[i].is_some() {
                return None;
            }
            index.nearest_satisfying(i, |j| density.denser(j, i)).map(|j| j as u32)
        })
        .collect();

    let mut labels = vec![0u32; index.len()];
    for p in density.order_desc() {
        let p = p as usize;
        labels[p] = match (core_of[p], parent[p]) {
            (Some(c), _) => c + 1,
            (None, Some(q)) => labels[q as usize],
            (None, None) => {
                return Err(Error::Contract(format!(
                    "point {p} has no denser point and is not in a core"
                )))
            }
        };
    }
    Ok(Labeling::new(labels).renumbered())
}
