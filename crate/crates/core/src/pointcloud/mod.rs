//! Point-cloud data model, labelings, and PLY I/O.
//!
//! Clouds are gravity aligned: `+z` is up, and the ground plane is `(x, y)`.
//! Point order matters; the point index is the final tie-break key in every
//! algorithm of this crate.

mod palette;
mod ply;

use std::collections::BTreeMap;

pub use palette::{color_to_label, label_to_color, MAX_LABEL};
pub use ply::{load_ply, load_ply_with, save_ply, LabelMode, PlyFormat};

use crate::error::{Error, Result};

/// A point in the cloud's native units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn xyz(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Projection onto the ground plane.
    pub fn xy(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(p: [f64; 3]) -> Self {
        Self::new(p[0], p[1], p[2])
    }
}

/// An ordered list of finite points with optional per-point labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Point3>,
    labels: Option<Vec<u32>>,
}

impl PointCloud {
    /// Builds an unlabeled cloud, rejecting non-finite coordinates.
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { points, labels: None })
    }

    /// Builds a labeled cloud. `labels` must have one entry per point.
    pub fn with_labels(points: Vec<Point3>, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::Contract(format!(
                "{} labels for {} points",
                labels.len(),
                points.len()
            )));
        }
        let mut cloud = Self::new(points)?;
        cloud.labels = Some(labels);
        Ok(cloud)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    /// The labels as a [`Labeling`], if present.
    pub fn labeling(&self) -> Option<Labeling> {
        self.labels.clone().map(Labeling::new)
    }

    pub fn positions_3d(&self) -> Vec<[f64; 3]> {
        self.points.iter().map(Point3::xyz).collect()
    }

    /// Ground-plane projection: the z coordinate is dropped.
    pub fn positions_2d(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(Point3::xy).collect()
    }

    /// Applies `f` to every point, keeping labels. Fails if `f` produces a
    /// non-finite coordinate.
    pub fn map_points(&self, f: impl Fn(Point3) -> Point3) -> Result<Self> {
        let points = self.points.iter().map(|&p| f(p)).collect();
        let mut cloud = Self::new(points)?;
        cloud.labels = self.labels.clone();
        Ok(cloud)
    }

    /// Uniformly scales every coordinate by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        self.map_points(|p| Point3::new(p.x * s, p.y * s, p.z * s))
    }

    pub fn into_parts(self) -> (Vec<Point3>, Option<Vec<u32>>) {
        (self.points, self.labels)
    }
}

/// One cluster id per point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Labeling(Vec<u32>);

impl Labeling {
    pub fn new(assignments: Vec<u32>) -> Self {
        Self(assignments)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    /// Point indices grouped by cluster id, ids ascending.
    pub fn clusters(&self) -> BTreeMap<u32, Vec<u32>> {
        let mut out: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (i, &l) in self.0.iter().enumerate() {
            out.entry(l).or_default().push(i as u32);
        }
        out
    }

    pub fn num_clusters(&self) -> usize {
        let mut ids = self.0.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// Renames ids to `1, 2, ...` in order of first appearance by point index.
    pub fn renumbered(&self) -> Self {
        let mut map = std::collections::HashMap::new();
        let out = self
            .0
            .iter()
            .map(|&l| {
                let next = map.len() as u32 + 1;
                *map.entry(l).or_insert(next)
            })
            .collect();
        Self(out)
    }

    /// True when both labelings induce the same partition of the points.
    pub fn same_partition(&self, other: &Labeling) -> bool {
        self.len() == other.len() && self.renumbered() == other.renumbered()
    }
}

impl From<Vec<u32>> for Labeling {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = PointCloud::new(vec![Point3::new(0.0, 0.0, 0.0), Point3::new(f64::NAN, 0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 1 }));
    }

    #[test]
    fn label_length_must_match() {
        let err = PointCloud::with_labels(vec![Point3::default()], vec![1, 2]).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn renumber_by_first_appearance() {
        let l = Labeling::new(vec![7, 7, 3, 9, 3]);
        assert_eq!(l.renumbered().as_slice(), &[1, 1, 2, 3, 2]);
        assert_eq!(l.num_clusters(), 3);
        assert!(l.same_partition(&Labeling::new(vec![0, 0, 5, 6, 5])));
        assert!(!l.same_partition(&Labeling::new(vec![0, 0, 5, 5, 5])));
    }
}
