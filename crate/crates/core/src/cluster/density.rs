use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;
use crate::spatial::{squared_distance, KdTree2, Neighbor};

/// Ground-plane k-NN density.
///
/// The density of point `i` is `r_k(i)^-2`, with `r_k` the distance to the
/// k-th nearest other point of the 2D projection. It is stored as `r_k^2`;
/// ordering and the `(1 - beta)` ratio test only need that. Points with
/// `r_k = 0` (at least `k` coincident projections) form an infinite-density
/// class.
///
/// The comparison key is `(density, -index)`: among equal densities the
/// smaller index counts as denser, so the key is a strict total order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    k: usize,
    radius_sq: Vec<f64>,
    kth: Vec<u32>,
}

impl DensityField {
    /// Builds a field from precomputed squared k-NN radii and the index of
    /// each point's k-th neighbor.
    pub fn from_parts(k: usize, radius_sq: Vec<f64>, kth: Vec<u32>) -> Result<Self> {
        if radius_sq.len() != kth.len() {
            return Err(Error::Contract("radius and neighbor arrays differ in length".into()));
        }
        if let Some(i) = radius_sq.iter().position(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::Contract(format!("invalid squared radius at point {i}")));
        }
        Ok(Self { k, radius_sq, kth })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.radius_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radius_sq.is_empty()
    }

    /// `r_k(i)^2`.
    pub fn radius_sq(&self, i: usize) -> f64 {
        self.radius_sq[i]
    }

    /// The k-th neighbor of `i` with its squared distance.
    pub fn kth_neighbor(&self, i: usize) -> Neighbor {
        Neighbor {
            dist_sq: self.radius_sq[i],
            index: self.kth[i] as usize,
        }
    }

    /// `r_k(i)^-2`, or infinity for coincident projections.
    pub fn value(&self, i: usize) -> f64 {
        let r2 = self.radius_sq[i];
        if r2 == 0.0 {
            f64::INFINITY
        } else {
            1.0 / r2
        }
    }

    pub fn is_infinite(&self, i: usize) -> bool {
        self.radius_sq[i] == 0.0
    }

    /// Compares the keys of `i` and `j`; `Greater` means `i` is denser.
    pub fn cmp_key(&self, i: usize, j: usize) -> Ordering {
        self.radius_sq[j].total_cmp(&self.radius_sq[i]).then(j.cmp(&i))
    }

    /// `key(i) > key(j)`.
    pub fn denser(&self, i: usize, j: usize) -> bool {
        self.cmp_key(i, j) == Ordering::Greater
    }

    /// Strictly higher density value. Only infinite-class points fall back
    /// to the index order; equal finite densities are incomparable.
    pub fn strictly_denser_value(&self, i: usize, j: usize) -> bool {
        let (ri, rj) = (self.radius_sq[i], self.radius_sq[j]);
        ri < rj || (ri == 0.0 && rj == 0.0 && i < j)
    }

    /// Point indices sorted by decreasing key.
    pub fn order_desc(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.len() as u32).collect();
        order.par_sort_unstable_by(|&a, &b| self.cmp_key(b as usize, a as usize));
        order
    }
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!(
            "k must satisfy 1 <= k <= n - 1 (n = {n}), got {k}"
        )));
    }
    Ok(())
}

/// Points per work unit of the density pass.
const DENSITY_CHUNK: usize = 512;

pub(crate) fn density_with_index(index: &KdTree2, k: usize) -> Result<DensityField> {
    check_k(k, index.len())?;
    // Walk points in tree order. By the triangle inequality
    // r_k(p) <= |p - prev| + r_k(prev), so a radius scan around p with that
    // bound (padded against rounding) holds its k nearest points.
    let per_chunk: Vec<Vec<(u32, Neighbor)>> = index
        .tree_order()
        .par_chunks(DENSITY_CHUNK)
        .map(|chunk| {
            let mut out = Vec::with_capacity(chunk.len());
            let mut prev: Option<(usize, f64)> = None;
            for &p in chunk {
                let p = p as usize;
                let q = index.point(p);
                let hinted = prev.and_then(|(j, r2)| {
                    let bound = squared_distance(q, index.point(j)).sqrt() + r2.sqrt();
                    let radius_sq = (bound * bound * (1.0 + 1e-9)).next_up();
                    index.kth_within(q, k, Some(p), radius_sq)
                });
                let nb = hinted.unwrap_or_else(|| *index.knn(q, k, Some(p)).last().expect("k <= n - 1"));
                prev = Some((p, nb.dist_sq));
                out.push((p as u32, nb));
            }
            out
        })
        .collect();

    let mut radius_sq = vec![0.0; index.len()];
    let mut kth = vec![0u32; index.len()];
    for (p, nb) in per_chunk.into_iter().flatten() {
        radius_sq[p as usize] = nb.dist_sq;
        kth[p as usize] = nb.index as u32;
    }
    Ok(DensityField { k, radius_sq, kth })
}

/// k-NN density of every point's ground-plane projection.
pub fn knn_density_2d(cloud: &PointCloud, k: usize) -> Result<DensityField> {
    check_k(k, cloud.len())?;
    let index = KdTree2::build(cloud.positions_2d())?;
    density_with_index(&index, k)
}
