use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::density::{check_k, DensityField};
use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;
use crate::spatial::{KdTree2, Neighbor};

/// Points per batch when precomputing mutual k-NN edges for the sweep.
const EDGE_BATCH: usize = 1 << 16;

/// A cluster core: a connected dense region seeded by its mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Core {
    /// Densest point of the core.
    pub mode: usize,
    pub mode_density: f64,
    /// Point indices, ascending.
    pub members: Vec<u32>,
}

/// Disjoint cluster cores, ordered by decreasing mode density.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoreSet {
    cores: Vec<Core>,
}

impl CoreSet {
    pub fn new(cores: Vec<Core>) -> Self {
        Self { cores }
    }

    pub fn cores(&self) -> &[Core] {
        &self.cores
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    /// Core index of every point, checking that cores are non-empty,
    /// disjoint and within `0..n`.
    pub fn membership(&self, n: usize) -> Result<Vec<Option<u32>>> {
        let mut of = vec![None; n];
        for (c, core) in self.cores.iter().enumerate() {
            if core.members.is_empty() {
                return Err(Error::Contract(format!("core {c} is empty")));
            }
            for &p in &core.members {
                let slot = of
                    .get_mut(p as usize)
                    .ok_or_else(|| Error::Contract(format!("core {c} references point {p} of a {n}-point cloud")))?;
                if slot.is_some() {
                    return Err(Error::Contract(format!("point {p} belongs to two cores")));
                }
                *slot = Some(c as u32);
            }
        }
        Ok(of)
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Parameter(format!("beta must lie in [0, 1], got {beta}")));
    }
    Ok(())
}

/// Whether a component whose mode has squared radius `mode_r2` locks once
/// the sweep reaches squared radius `level_r2`, i.e. whether
/// `density(level) < (1 - beta) * density(mode)`.
fn locks(mode_r2: f64, level_r2: f64, beta: f64) -> bool {
    if mode_r2 == 0.0 {
        // Infinite mode density.
        return beta == 0.0 || (beta < 1.0 && level_r2 > 0.0);
    }
    mode_r2 < (1.0 - beta) * level_r2
}

/// Extracts Quickshift++ cluster cores from the mutual k-NN graph of the
/// ground-plane projection.
///
/// Points are swept in decreasing density. A component locks, snapshotting
/// its members as a core, once the sweep level drops below `(1 - beta)`
/// times its mode density. Locked components absorb unlocked ones they
/// touch without adding members to the snapshot. Components still unlocked
/// when the sweep ends become cores with their full membership.
pub fn extract_cores(cloud: &PointCloud, density: &DensityField, k: usize, beta: f64) -> Result<CoreSet> {
    check_beta(beta)?;
    if density.len() != cloud.len() {
        return Err(Error::Contract(format!(
            "density has {} values for {} points",
            density.len(),
            cloud.len()
        )));
    }
    if density.k() != k {
        return Err(Error::Contract(format!(
            "density was computed with k = {} but cores requested with k = {k}",
            density.k()
        )));
    }
    if cloud.is_empty() {
        return Ok(CoreSet::default());
    }
    check_k(k, cloud.len())?;
    let index = KdTree2::build(cloud.positions_2d())?;
    Ok(cores_with_index(&index, density, beta))
}

pub(crate) fn cores_with_index(index: &KdTree2, density: &DensityField, beta: f64) -> CoreSet {
    let n = density.len();
    let order = density.order_desc();
    let mut rank = vec![0u32; n];
    for (r, &p) in order.iter().enumerate() {
        rank[p as usize] = r as u32;
    }

    // What the edge test reads about a neighbor, packed for locality.
    let info: Vec<(u32, Neighbor)> = (0..n).map(|j| (rank[j], density.kth_neighbor(j))).collect();
    let mut tree_pos = vec![0u32; n];
    for (t, &p) in index.tree_order().iter().enumerate() {
        tree_pos[p as usize] = t as u32;
    }

    let mut sweep = Sweep::new(density, beta, &rank);
    let mut queries: Vec<u32> = Vec::with_capacity(EDGE_BATCH);
    let mut edges: Vec<Vec<u32>> = vec![Vec::new(); EDGE_BATCH];
    for batch in order.chunks(EDGE_BATCH) {
        // Mutual edges from each point to already swept points. Every
        // k-NN of `p` lies within `r_k(p)`, so a radius scan finds them
        // without a selection step. Queries run in tree order for locality.
        queries.clear();
        queries.extend(0..batch.len() as u32);
        queries.sort_unstable_by_key(|&b| tree_pos[batch[b as usize] as usize]);
        let found: Vec<(u32, Vec<u32>)> = queries
            .par_iter()
            .map(|&b| {
                let p = batch[b as usize] as usize;
                let (rank_p, own) = info[p];
                let mut nbrs = Vec::new();
                index.for_each_within(index.point(p), own.dist_sq.next_up(), |j, dist_sq| {
                    let (rank_j, kth_j) = info[j];
                    if rank_j < rank_p
                        && (Neighbor { dist_sq, index: j }) <= own
                        && (Neighbor { dist_sq, index: p }) <= kth_j
                    {
                        nbrs.push(j as u32);
                    }
                });
                (b, nbrs)
            })
            .collect();
        for (b, nbrs) in found {
            edges[b as usize] = nbrs;
        }
        for (&p, nbrs) in batch.iter().zip(&edges) {
            sweep.process(p as usize, nbrs);
        }
    }
    sweep.finish(&order)
}

struct Sweep<'a> {
    density: &'a DensityField,
    beta: f64,
    rank: &'a [u32],
    uf: UnionFind,
    // Indexed by component root.
    mode: Vec<u32>,
    locked: Vec<bool>,
    members: Vec<Vec<u32>>,
    /// Unlocked component modes by rank; may hold stale entries.
    pending: BinaryHeap<Reverse<(u32, u32)>>,
    cores: Vec<Core>,
}

impl<'a> Sweep<'a> {
    fn new(density: &'a DensityField, beta: f64, rank: &'a [u32]) -> Self {
        let n = density.len();
        Self {
            density,
            beta,
            rank,
            uf: UnionFind::new(n),
            mode: (0..n as u32).collect(),
            locked: vec![false; n],
            members: vec![Vec::new(); n],
            pending: BinaryHeap::new(),
            cores: Vec::new(),
        }
    }

    fn process(&mut self, p: usize, neighbors: &[u32]) {
        let level = self.density.radius_sq(p);
        while let Some(&Reverse((_, m))) = self.pending.peek() {
            let root = self.uf.find(m as usize);
            if self.locked[root] || self.mode[root] != m {
                self.pending.pop();
                continue;
            }
            if !locks(self.density.radius_sq(m as usize), level, self.beta) {
                break;
            }
            self.pending.pop();
            self.lock(root);
        }

        self.members[p] = vec![p as u32];
        self.pending.push(Reverse((self.rank[p], p as u32)));
        for &j in neighbors {
            self.merge(p, j as usize);
        }
    }

    fn lock(&mut self, root: usize) {
        self.locked[root] = true;
        let mut members = std::mem::take(&mut self.members[root]);
        members.sort_unstable();
        let mode = self.mode[root] as usize;
        self.cores.push(Core {
            mode,
            mode_density: self.density.value(mode),
            members,
        });
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.uf.find(a), self.uf.find(b));
        if ra == rb {
            return;
        }
        let locked = self.locked[ra] || self.locked[rb];
        let mode = if self.rank[self.mode[ra] as usize] < self.rank[self.mode[rb] as usize] {
            self.mode[ra]
        } else {
            self.mode[rb]
        };
        let mut ma = std::mem::take(&mut self.members[ra]);
        let mut mb = std::mem::take(&mut self.members[rb]);
        let root = self.uf.union(ra, rb);
        self.locked[root] = locked;
        self.mode[root] = mode;
        if !locked {
            if ma.len() < mb.len() {
                std::mem::swap(&mut ma, &mut mb);
            }
            ma.extend_from_slice(&mb);
            self.members[root] = ma;
        }
    }

    fn finish(mut self, order: &[u32]) -> CoreSet {
        for &p in order {
            let root = self.uf.find(p as usize);
            if !self.locked[root] {
                self.lock(root);
            }
        }
        let rank = self.rank;
        self.cores.sort_by_key(|c| rank[c.mode]);
        CoreSet::new(self.cores)
    }
}

/// Disjoint sets with union by size and path halving.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Joins the sets of `a` and `b`, returning the new root.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        ra
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::knn_density_2d;
    use crate::pointcloud::Point3;

    fn line(xs: &[f64]) -> PointCloud {
        PointCloud::new(xs.iter().map(|&x| Point3::new(x, 0.0, 0.0)).collect()).unwrap()
    }

    #[test]
    fn union_find_basics() {
        let mut uf = UnionFind::new(5);
        uf.union(0, 1);
        uf.union(3, 4);
        assert_eq!(uf.find(1), uf.find(0));
        assert_ne!(uf.find(1), uf.find(3));
        uf.union(1, 4);
        assert_eq!(uf.find(0), uf.find(3));
    }

    #[test]
    fn lock_rule() {
        // density 1/r2: mode 1.0 (r2 = 1), level 0.5 (r2 = 2).
        assert!(!locks(1.0, 2.0, 0.7));
        assert!(locks(1.0, 2.0, 0.4));
        assert!(!locks(1.0, 1.0, 0.0));
        assert!(locks(1.0, 1.5, 0.0));
        assert!(!locks(1.0, 1e300, 1.0));
        // Infinite modes.
        assert!(locks(0.0, 0.0, 0.0));
        assert!(!locks(0.0, 0.0, 0.3));
        assert!(locks(0.0, 1e-9, 0.3));
        assert!(!locks(0.0, 1e9, 1.0));
    }

    #[test]
    fn two_clumps_two_cores() {
        let c = line(&[0.0, 0.1, 0.2, 5.0, 5.1, 5.2]);
        let f = knn_density_2d(&c, 2).unwrap();
        let cores = extract_cores(&c, &f, 2, 0.3).unwrap();
        assert_eq!(cores.len(), 2);
        let mut modes: Vec<usize> = cores.cores().iter().map(|c| c.mode).collect();
        modes.sort();
        assert_eq!(modes, vec![1, 4]);
        for core in cores.cores() {
            let clump = if core.mode < 3 { 0..3 } else { 3..6 };
            assert!(core.members.iter().all(|&m| clump.contains(&(m as usize))));
        }
    }

    #[test]
    fn beta_one_gives_graph_components() {
        let c = line(&[0.0, 0.1, 0.2, 5.0, 5.1, 5.2]);
        let f = knn_density_2d(&c, 2).unwrap();
        let cores = extract_cores(&c, &f, 2, 1.0).unwrap();
        let mut members: Vec<Vec<u32>> = cores.cores().iter().map(|c| c.members.clone()).collect();
        members.sort();
        assert_eq!(members, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn single_clump_single_core() {
        let c = PointCloud::new(
            (0..12)
                .map(|i| Point3::new((i % 4) as f64 * 0.01, (i / 4) as f64 * 0.01, 0.0))
                .collect(),
        )
        .unwrap();
        for beta in [0.0, 0.3, 1.0] {
            let f = knn_density_2d(&c, 3).unwrap();
            let cores = extract_cores(&c, &f, 3, beta).unwrap();
            assert!(!cores.is_empty());
            assert_eq!(cores.membership(12).unwrap().len(), 12);
        }
        let f = knn_density_2d(&c, 3).unwrap();
        let cores = extract_cores(&c, &f, 3, 1.0).unwrap();
        assert_eq!(cores.len(), 1);
        assert_eq!(cores.cores()[0].members.len(), 12);
    }

    #[test]
    fn bad_parameters() {
        let c = line(&[0.0, 1.0, 2.0]);
        let f = knn_density_2d(&c, 1).unwrap();
        assert!(matches!(extract_cores(&c, &f, 1, 1.5), Err(Error::Parameter(_))));
        assert!(matches!(extract_cores(&c, &f, 1, -0.1), Err(Error::Parameter(_))));
        assert!(matches!(extract_cores(&c, &f, 2, 0.3), Err(Error::Contract(_))));
    }

    #[test]
    fn membership_rejects_overlap() {
        let set = CoreSet::new(vec![
            Core {
                mode: 0,
                mode_density: 1.0,
                members: vec![0, 1],
            },
            Core {
                mode: 2,
                mode_density: 1.0,
                members: vec![1, 2],
            },
        ]);
        assert!(set.membership(3).is_err());
        assert!(set.membership(2).is_err());
    }
}
