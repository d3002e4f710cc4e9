//! Labeled synthetic crop fields.
//!
//! A field is a `rows x cols` grid of corn-like plants: a vertical stem plus
//! a few leaves shaped as circular arcs in random vertical planes through
//! the stem. Some grid positions hold two overlapping plants (double
//! planting). Ground points are labeled 0, plants `1..=N`.
//!
//! Every plant draws from its own ChaCha stream keyed by `(seed, label)`, so
//! the output does not depend on generation order or thread count.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointcloud::{Point3, PointCloud};

const LAYOUT_STREAM: u64 = u64::MAX;
const GROUND_STREAM: u64 = u64::MAX - 1;

/// Fraction of a leafy plant's points that lie on the stem.
const STEM_FRACTION: f64 = 0.4;
const RISE_LO: f64 = 0.9;
const RISE_HI: f64 = 1.3;

/// Parameters of a synthetic field. Lengths are in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSpec {
    pub rows: usize,
    pub cols: usize,
    pub row_spacing: f64,
    pub plant_spacing: f64,
    /// Maximum per-axis offset of a plant from its grid position.
    pub position_jitter: f64,
    pub points_per_plant: usize,
    pub stem_height: f64,
    pub leaf_count: usize,
    pub leaf_length: f64,
    pub double_plant_prob: f64,
    /// Ground points per square meter.
    pub ground_point_density: f64,
    /// Standard deviation of the isotropic Gaussian noise on every point.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self {
            rows: 10,
            cols: 10,
            row_spacing: 0.76,
            plant_spacing: 0.2,
            position_jitter: 0.02,
            points_per_plant: 1000,
            stem_height: 0.5,
            leaf_count: 6,
            leaf_length: 0.2,
            double_plant_prob: 0.05,
            ground_point_density: 300.0,
            noise_sigma: 0.003,
            seed: 42,
        }
    }
}

/// The per-plant part of a [`FieldSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantShape {
    pub points_per_plant: usize,
    pub stem_height: f64,
    pub leaf_count: usize,
    pub leaf_length: f64,
    pub noise_sigma: f64,
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Parameter(format!("invalid field spec: {what}")));
        let positive = |v: f64| v > 0.0 && v.is_finite();
        let non_negative = |v: f64| v >= 0.0 && v.is_finite();
        if self.rows == 0 || self.cols == 0 {
            return bad("rows and cols must be positive");
        }
        if !positive(self.row_spacing) || !positive(self.plant_spacing) {
            return bad("spacings must be positive");
        }
        if !non_negative(self.position_jitter) {
            return bad("position_jitter must be non-negative");
        }
        if self.points_per_plant == 0 {
            return bad("points_per_plant must be positive");
        }
        if !positive(self.stem_height) || !positive(self.leaf_length) {
            return bad("stem_height and leaf_length must be positive");
        }
        if !(0.0..=1.0).contains(&self.double_plant_prob) {
            return bad("double_plant_prob must lie in [0, 1]");
        }
        if !non_negative(self.ground_point_density) {
            return bad("ground_point_density must be non-negative");
        }
        if !non_negative(self.noise_sigma) {
            return bad("noise_sigma must be non-negative");
        }
        Ok(())
    }

    pub fn plant_shape(&self) -> PlantShape {
        PlantShape {
            points_per_plant: self.points_per_plant,
            stem_height: self.stem_height,
            leaf_count: self.leaf_count,
            leaf_length: self.leaf_length,
            noise_sigma: self.noise_sigma,
        }
    }

    /// Parses a flat `key = value` (TOML) config; missing keys keep their
    /// defaults.
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let spec = Self::from_toml_str(&text).map_err(|message| Error::Config {
            path: path.to_path_buf(),
            message,
        })?;
        spec.validate()?;
        Ok(spec)
    }

    fn ground_extent(&self) -> ([f64; 2], [f64; 2]) {
        let lo = [-0.5 * self.plant_spacing, -0.5 * self.row_spacing];
        let hi = [
            (self.cols as f64 - 0.5) * self.plant_spacing,
            (self.rows as f64 - 0.5) * self.row_spacing,
        ];
        (lo, hi)
    }

    fn ground_count(&self) -> usize {
        let (lo, hi) = self.ground_extent();
        (self.ground_point_density * (hi[0] - lo[0]) * (hi[1] - lo[1])).round() as usize
    }

    /// Expected number of points.
    pub fn expected_points(&self) -> f64 {
        let plants = (self.rows * self.cols) as f64 * (1.0 + self.double_plant_prob);
        plants * self.points_per_plant as f64 + self.ground_count() as f64
    }

    /// Same spec with as many columns as needed for roughly `n` points.
    pub fn scaled_to(&self, n: usize) -> Self {
        let per_position = self.points_per_plant as f64 * (1.0 + self.double_plant_prob)
            + self.ground_point_density * self.plant_spacing * self.row_spacing;
        let positions = (n as f64 / per_position).round().max(1.0) as usize;
        let rows = self.rows.min(positions).max(1);
        Self {
            rows,
            cols: positions.div_ceil(rows),
            ..self.clone()
        }
    }
}

fn gaussian(rng: &mut impl Rng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let z: f64 = rng.sample(StandardNormal);
    sigma * z
}

/// One plant at ground position `base`: exactly `points_per_plant` points.
pub fn generate_plant(shape: &PlantShape, rng: &mut impl Rng, base: [f64; 2]) -> Vec<Point3> {
    let n = shape.points_per_plant;
    let stem_n = if shape.leaf_count == 0 {
        n
    } else {
        ((n as f64 * STEM_FRACTION).round() as usize).clamp(1, n)
    };
    let sigma = shape.noise_sigma;
    let mut out = Vec::with_capacity(n);

    for _ in 0..stem_n {
        let z = rng.random_range(0.0..shape.stem_height);
        out.push(Point3::new(
            base[0] + gaussian(rng, sigma),
            base[1] + gaussian(rng, sigma),
            z + gaussian(rng, sigma),
        ));
    }
    if shape.leaf_count == 0 {
        return out;
    }

    let leaf_points = n - stem_n;
    let first_azimuth = rng.random_range(0.0..2.0 * PI);
    for j in 0..shape.leaf_count {
        let count = leaf_points / shape.leaf_count + usize::from(j < leaf_points % shape.leaf_count);
        let attach = shape.stem_height * (0.3 + 0.6 * (j as f64 + 0.5) / shape.leaf_count as f64);
        let azimuth = first_azimuth + j as f64 * PI + rng.random_range(-0.4..0.4);
        let (dir_y, dir_x) = azimuth.sin_cos();
        // Initial climb angle and total turning of the arc.
        let rise: f64 = rng.random_range(RISE_LO..RISE_HI);
        let sweep = rng.random_range(1.6..2.4);
        let radius = shape.leaf_length / sweep;
        let half_width = 0.04 * shape.leaf_length;

        for _ in 0..count {
            let s = rng.random_range(0.0..shape.leaf_length);
            let t = s / radius;
            let along = radius * (rise.sin() - (rise - t).sin());
            let up = radius * ((rise - t).cos() - rise.cos());
            let across = half_width * (1.0 - s / shape.leaf_length) * rng.random_range(-1.0..1.0);
            out.push(Point3::new(
                base[0] + along * dir_x - across * dir_y + gaussian(rng, sigma),
                base[1] + along * dir_y + across * dir_x + gaussian(rng, sigma),
                attach + up + gaussian(rng, sigma),
            ));
        }
    }
    out
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Plant base positions in label order (label = index + 1).
fn layout(spec: &FieldSpec) -> Vec<[f64; 2]> {
    let mut rng = stream_rng(spec.seed, LAYOUT_STREAM);
    let mut bases = Vec::with_capacity(spec.rows * spec.cols);
    let jitter = spec.position_jitter;
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            let mut offset = || {
                if jitter > 0.0 {
                    rng.random_range(-jitter..=jitter)
                } else {
                    0.0
                }
            };
            let base = [
                c as f64 * spec.plant_spacing + offset(),
                r as f64 * spec.row_spacing + offset(),
            ];
            bases.push(base);
            if rng.random_bool(spec.double_plant_prob) {
                let angle = rng.random_range(0.0..2.0 * PI);
                let dist = rng.random_range(0.3..0.9) * spec.plant_spacing / 4.0;
                bases.push([base[0] + dist * angle.cos(), base[1] + dist * angle.sin()]);
            }
        }
    }
    bases
}

/// Generates a labeled field. Equal specs give bit-identical clouds.
pub fn generate_field(spec: &FieldSpec) -> Result<PointCloud> {
    spec.validate()?;
    let shape = spec.plant_shape();
    let bases = layout(spec);

    let plants: Vec<Vec<Point3>> = bases
        .par_iter()
        .enumerate()
        .map(|(i, &base)| {
            let mut rng = stream_rng(spec.seed, i as u64 + 1);
            generate_plant(&shape, &mut rng, base)
        })
        .collect();

    let ground_n = spec.ground_count();
    let total = plants.iter().map(Vec::len).sum::<usize>() + ground_n;
    let mut points = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for (i, plant) in plants.into_iter().enumerate() {
        labels.extend(std::iter::repeat_n(i as u32 + 1, plant.len()));
        points.extend(plant);
    }

    let mut rng = stream_rng(spec.seed, GROUND_STREAM);
    let (lo, hi) = spec.ground_extent();
    for _ in 0..ground_n {
        let x = rng.random_range(lo[0]..hi[0]);
        let y = rng.random_range(lo[1]..hi[1]);
        points.push(Point3::new(x, y, gaussian(&mut rng, spec.noise_sigma)));
        labels.push(0);
    }
    PointCloud::with_labels(points, labels)
}

/// Number of plants (non-zero labels) in a generated field.
pub fn plant_count(cloud: &PointCloud) -> usize {
    cloud
        .labels()
        .map(|l| l.iter().copied().max().unwrap_or(0) as usize)
        .unwrap_or(0)
}
