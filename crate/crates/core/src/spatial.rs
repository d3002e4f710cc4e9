//! Immutable kD-tree over 2D or 3D points.
//!
//! All results follow the same total order: squared Euclidean distance, then
//! original point index. Distances are compared squared, computed as
//! `sum_k (a_k - b_k)^2` in dimension order; [`squared_distance`] is the
//! single definition used everywhere.
//!
//! The tree is implicit: points are permuted so that every subrange
//! `[lo, hi)` is a subtree whose median element at `(lo + hi) / 2` is the
//! splitting node. Ranges of at most [`LEAF_SIZE`] points are scanned
//! linearly.

use std::cmp::Ordering;

use crate::error::{Error, Result};

const LEAF_SIZE: usize = 8;

/// Squared Euclidean distance.
#[inline]
pub fn squared_distance<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    let mut acc = 0.0;
    for k in 0..D {
        let t = a[k] - b[k];
        acc += t * t;
    }
    acc
}

/// A neighbor candidate ordered by `(squared distance, index)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub dist_sq: f64,
    pub index: usize,
}

impl Eq for Neighbor {}

impl PartialOrd for Neighbor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Neighbor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist_sq
            .total_cmp(&other.dist_sq)
            .then(self.index.cmp(&other.index))
    }
}

/// The `k` smallest candidates seen so far.
///
/// Candidates are buffered and cut back to `k` by selection once the buffer
/// holds `2k`, which is much cheaper than a heap for large `k`. `bound` is
/// the largest of some `k` kept candidates, so it never undercuts the true
/// k-th smallest.
struct KBest {
    k: usize,
    items: Vec<Neighbor>,
    bound: Option<Neighbor>,
}

impl KBest {
    fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(2 * k.min(1 << 16)),
            bound: None,
        }
    }

    fn bound(&self) -> Option<Neighbor> {
        self.bound
    }

    #[inline]
    fn offer(&mut self, cand: Neighbor) {
        if let Some(b) = self.bound {
            if cand >= b {
                return;
            }
        }
        self.items.push(cand);
        if self.bound.is_none() && self.items.len() == self.k {
            self.bound = self.items.iter().max().copied();
        } else if self.items.len() >= 2 * self.k {
            self.shrink();
        }
    }

    fn shrink(&mut self) {
        let k = self.k;
        self.items.select_nth_unstable(k - 1);
        self.items.truncate(k);
        self.bound = Some(self.items[k - 1]);
    }

    fn into_sorted(mut self) -> Vec<Neighbor> {
        if self.items.len() > self.k {
            self.shrink();
        }
        self.items.sort_unstable();
        self.items
    }
}

/// Balanced kD-tree with median splits along the axis of widest spread.
#[derive(Debug, Clone)]
pub struct KdTree<const D: usize> {
    /// Coordinates in original order.
    points: Vec<[f64; D]>,
    /// Coordinates in tree order.
    nodes: Vec<[f64; D]>,
    /// Tree order -> original index.
    ids: Vec<u32>,
    /// Split axis of the node stored at each tree position (internal nodes only).
    axis: Vec<u8>,
}

pub type KdTree2 = KdTree<2>;
pub type KdTree3 = KdTree<3>;

impl<const D: usize> KdTree<D> {
    /// Builds the index in `O(n log n)`.
    pub fn build(points: Vec<[f64; D]>) -> Result<Self> {
        assert!(D == 2 || D == 3, "only 2D and 3D indices are supported");
        if let Some(index) = points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        if points.len() > u32::MAX as usize {
            return Err(Error::Data("too many points for the index".into()));
        }
        let n = points.len();
        let mut ids: Vec<u32> = (0..n as u32).collect();
        let mut axis = vec![0u8; n];
        build_range(&points, &mut ids, &mut axis, 0);
        let nodes = ids.iter().map(|&i| points[i as usize]).collect();
        Ok(Self {
            points,
            nodes,
            ids,
            axis,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinates of point `index`.
    pub fn point(&self, index: usize) -> &[f64; D] {
        &self.points[index]
    }

    pub fn points(&self) -> &[[f64; D]] {
        &self.points
    }

    /// Calls `visit(index, dist_sq)` for every point with `dist_sq < radius_sq`,
    /// in unspecified order.
    pub fn for_each_within(&self, q: &[f64; D], radius_sq: f64, mut visit: impl FnMut(usize, f64)) {
        self.within_rec(0, self.nodes.len(), q, radius_sq, &mut visit);
    }

    fn within_rec(&self, lo: usize, hi: usize, q: &[f64; D], radius_sq: f64, visit: &mut impl FnMut(usize, f64)) {
        if hi - lo <= LEAF_SIZE {
            for t in lo..hi {
                let d2 = squared_distance(q, &self.nodes[t]);
                if d2 < radius_sq {
                    visit(self.ids[t] as usize, d2);
                }
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let node = &self.nodes[mid];
        let d2 = squared_distance(q, node);
        if d2 < radius_sq {
            visit(self.ids[mid] as usize, d2);
        }
        let diff = q[self.axis[mid] as usize] - node[self.axis[mid] as usize];
        let (near, far) = if diff <= 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.within_rec(near.0, near.1, q, radius_sq, visit);
        if diff * diff < radius_sq {
            self.within_rec(far.0, far.1, q, radius_sq, visit);
        }
    }

    /// Indices of all points at distance strictly less than `d` from `q`,
    /// sorted by `(distance, index)`.
    pub fn radius_neighbors(&self, q: &[f64; D], d: f64) -> Result<Vec<usize>> {
        if d.is_nan() || d <= 0.0 || d.is_infinite() {
            return Err(Error::Parameter(format!("radius must be positive and finite, got {d}")));
        }
        let mut found = Vec::new();
        self.for_each_within(q, d * d, |index, dist_sq| found.push(Neighbor { dist_sq, index }));
        found.sort_unstable();
        Ok(found.into_iter().map(|n| n.index).collect())
    }

    /// The `k` smallest points under `(distance, index)`, optionally skipping
    /// one index, sorted ascending. Returns fewer than `k` if the cloud is
    /// smaller.
    pub fn knn(&self, q: &[f64; D], k: usize, exclude: Option<usize>) -> Vec<Neighbor> {
        if k == 0 {
            return Vec::new();
        }
        let mut best = KBest::new(k);
        self.knn_rec(
            0,
            self.nodes.len(),
            q,
            exclude.map(|e| e as u32),
            &mut best,
            0.0,
            &mut [0.0; D],
        );
        best.into_sorted()
    }

    #[inline]
    fn knn_offer(&self, t: usize, q: &[f64; D], exclude: Option<u32>, best: &mut KBest) {
        if Some(self.ids[t]) == exclude {
            return;
        }
        best.offer(Neighbor {
            dist_sq: squared_distance(q, &self.nodes[t]),
            index: self.ids[t] as usize,
        });
    }

    /// `off[a]` is the offset of the current cell from `q` along axis `a`
    /// and `rd` their squared sum, a lower bound on distances inside it.
    #[allow(clippy::too_many_arguments)]
    fn knn_rec(
        &self,
        lo: usize,
        hi: usize,
        q: &[f64; D],
        exclude: Option<u32>,
        best: &mut KBest,
        rd: f64,
        off: &mut [f64; D],
    ) {
        if hi - lo <= LEAF_SIZE {
            for t in lo..hi {
                self.knn_offer(t, q, exclude, best);
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        self.knn_offer(mid, q, exclude, best);
        let a = self.axis[mid] as usize;
        let diff = q[a] - self.nodes[mid][a];
        let (near, far) = if diff <= 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.knn_rec(near.0, near.1, q, exclude, best, rd, off);
        let saved = off[a];
        let far_rd = rd - saved * saved + diff * diff;
        // Equal bounds must still be visited: a tied distance with a
        // smaller index can displace the current worst.
        if best.bound().is_none_or(|b| far_rd <= b.dist_sq) {
            off[a] = diff;
            self.knn_rec(far.0, far.1, q, exclude, best, far_rd, off);
            off[a] = saved;
        }
    }

    /// Distance from point `query_index` to its `k`-th nearest other point.
    pub fn kth_neighbor_distance(&self, query_index: usize, k: usize) -> Result<f64> {
        Ok(self.kth_neighbor(query_index, k)?.dist_sq.sqrt())
    }

    /// The `k`-th nearest other point of `query_index` under `(distance, index)`.
    pub fn kth_neighbor(&self, query_index: usize, k: usize) -> Result<Neighbor> {
        let n = self.len();
        if k == 0 || k >= n {
            return Err(Error::Parameter(format!(
                "k must satisfy 1 <= k <= n - 1 (n = {n}), got {k}"
            )));
        }
        let q = self.points[query_index];
        Ok(*self.knn(&q, k, Some(query_index)).last().expect("k <= n - 1 neighbors"))
    }

    /// The `k`-th nearest point other than `exclude`, found by scanning
    /// `dist_sq < radius_sq` only. `None` if that ball holds fewer than `k`
    /// such points; otherwise the result equals the `k`-th entry of
    /// [`knn`](Self::knn).
    pub fn kth_within(&self, q: &[f64; D], k: usize, exclude: Option<usize>, radius_sq: f64) -> Option<Neighbor> {
        if k == 0 {
            return None;
        }
        let mut found = Vec::with_capacity(2 * k);
        self.for_each_within(q, radius_sq, |index, dist_sq| {
            if Some(index) != exclude {
                found.push(Neighbor { dist_sq, index });
            }
        });
        if found.len() < k {
            return None;
        }
        Some(*found.select_nth_unstable(k - 1).1)
    }

    /// Point indices in tree order; consecutive entries are spatially close.
    pub fn tree_order(&self) -> &[u32] {
        &self.ids
    }

    /// Nearest point other than `exclude` that satisfies `accept`, optionally
    /// restricted to `dist_sq < max_dist_sq`. Ties go to the smaller index.
    pub fn nearest_where(
        &self,
        q: &[f64; D],
        exclude: Option<usize>,
        max_dist_sq: Option<f64>,
        accept: impl Fn(usize) -> bool,
    ) -> Option<Neighbor> {
        let mut search = Search {
            tree: self,
            q,
            exclude: exclude.map(|e| e as u32),
            cap: max_dist_sq.unwrap_or(f64::INFINITY),
            accept: &accept,
            best: None,
        };
        search.run(0, self.nodes.len());
        search.best
    }

    /// Nearest point to `query_index` (itself excluded) accepted by `accept`,
    /// with no distance limit.
    pub fn nearest_satisfying(&self, query_index: usize, accept: impl Fn(usize) -> bool) -> Option<usize> {
        let q = self.points[query_index];
        self.nearest_where(&q, Some(query_index), None, accept).map(|n| n.index)
    }
}

struct Search<'a, const D: usize, F> {
    tree: &'a KdTree<D>,
    q: &'a [f64; D],
    exclude: Option<u32>,
    cap: f64,
    accept: &'a F,
    best: Option<Neighbor>,
}

impl<const D: usize, F: Fn(usize) -> bool> Search<'_, D, F> {
    fn offer(&mut self, t: usize) {
        let id = self.tree.ids[t];
        if Some(id) == self.exclude {
            return;
        }
        let dist_sq = squared_distance(self.q, &self.tree.nodes[t]);
        if dist_sq.is_nan() || dist_sq >= self.cap {
            return;
        }
        let cand = Neighbor {
            dist_sq,
            index: id as usize,
        };
        if self.best.is_some_and(|b| cand >= b) {
            return;
        }
        if (self.accept)(id as usize) {
            self.best = Some(cand);
        }
    }

    fn may_contain(&self, bound: f64) -> bool {
        bound < self.cap && self.best.is_none_or(|b| bound <= b.dist_sq)
    }

    fn run(&mut self, lo: usize, hi: usize) {
        if hi - lo <= LEAF_SIZE {
            for t in lo..hi {
                self.offer(t);
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        self.offer(mid);
        let a = self.tree.axis[mid] as usize;
        let diff = self.q[a] - self.tree.nodes[mid][a];
        let (near, far) = if diff <= 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.run(near.0, near.1);
        if self.may_contain(diff * diff) {
            self.run(far.0, far.1);
        }
    }
}

fn build_range<const D: usize>(points: &[[f64; D]], ids: &mut [u32], axis: &mut [u8], offset: usize) {
    let n = ids.len();
    if n <= LEAF_SIZE {
        return;
    }
    let mut lo = [f64::INFINITY; D];
    let mut hi = [f64::NEG_INFINITY; D];
    for &i in ids.iter() {
        let p = &points[i as usize];
        for k in 0..D {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let split = (0..D)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a)))
        .unwrap();
    let mid = n / 2;
    ids.select_nth_unstable_by(mid, |&a, &b| {
        points[a as usize][split]
            .total_cmp(&points[b as usize][split])
            .then(a.cmp(&b))
    });
    axis[offset + mid] = split as u8;
    let (left, rest) = ids.split_at_mut(mid);
    build_range(points, left, axis, offset);
    build_range(points, &mut rest[1..], axis, offset + mid + 1);
}
