//! The four clustering algorithms.
//!
//! Each algorithm builds a parent forest (or, for GD Quickshift++, cores plus
//! a climb) over a kD-tree and turns it into a [`Labeling`]. Parent edges
//! always strictly increase the algorithm's comparison key, so forests are
//! acyclic by construction.

mod cores;
mod density;
mod forest;
mod gdqs;
mod gdqspp;
mod rain;
mod zquickshift;

use std::fmt;
use std::str::FromStr;

pub use cores::{extract_cores, Core, CoreSet};
pub use density::{knn_density_2d, DensityField};
pub use forest::{forest_to_labels, ParentForest};
pub use gdqs::gdqs_parents;
pub use gdqspp::gdqspp_assign;
pub use rain::rain_parents;
pub use zquickshift::zqs_parents;

use crate::error::{Error, Result};
use crate::pointcloud::{Labeling, PointCloud};
use crate::spatial::{KdTree2, KdTree3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Non-random RAIN.
    Rain,
    /// Z-Quickshift.
    ZQuickshift,
    /// Ground Density Quickshift.
    GdQuickshift,
    /// Ground Density Quickshift++.
    GdQuickshiftPP,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Rain,
        Algorithm::ZQuickshift,
        Algorithm::GdQuickshift,
        Algorithm::GdQuickshiftPP,
    ];

    pub fn takes_d(self) -> bool {
        !matches!(self, Self::GdQuickshiftPP)
    }

    pub fn takes_k(self) -> bool {
        matches!(self, Self::GdQuickshift | Self::GdQuickshiftPP)
    }

    pub fn takes_beta(self) -> bool {
        matches!(self, Self::GdQuickshiftPP)
    }

    /// Short name used on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            Self::Rain => "rain",
            Self::ZQuickshift => "zqs",
            Self::GdQuickshift => "gdqs",
            Self::GdQuickshiftPP => "gdqspp",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Rain => "Non-random RAIN",
            Self::ZQuickshift => "Z-Quickshift",
            Self::GdQuickshift => "GD Quickshift",
            Self::GdQuickshiftPP => "GD Quickshift++",
        }
    }

    fn requirement(self) -> &'static str {
        match self {
            Self::Rain | Self::ZQuickshift => "d",
            Self::GdQuickshift => "d and k",
            Self::GdQuickshiftPP => "k and beta",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown algorithm '{s}' (expected rain, zqs, gdqs or gdqspp)")))
    }
}

/// Validated algorithm parameters.
///
/// | algorithm | `d` | `k` | `beta` |
/// |-----------|-----|-----|--------|
/// | rain      |  x  |     |        |
/// | zqs       |  x  |     |        |
/// | gdqs      |  x  |  x  |        |
/// | gdqspp    |     |  x  |   x    |
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    algorithm: Algorithm,
    d: Option<f64>,
    k: Option<usize>,
    beta: Option<f64>,
}

impl Params {
    /// Checks that exactly the parameters the algorithm takes are given and
    /// that each is in range.
    pub fn new(algorithm: Algorithm, d: Option<f64>, k: Option<usize>, beta: Option<f64>) -> Result<Self> {
        let arity = |name: &str, given: bool, wanted: bool| -> Result<()> {
            if given == wanted {
                return Ok(());
            }
            let verb = if wanted { "requires" } else { "does not accept" };
            Err(Error::Parameter(format!(
                "{} {verb} '{name}' (it takes {})",
                algorithm.name(),
                algorithm.requirement()
            )))
        };
        arity("d", d.is_some(), algorithm.takes_d())?;
        arity("k", k.is_some(), algorithm.takes_k())?;
        arity("beta", beta.is_some(), algorithm.takes_beta())?;
        if let Some(d) = d {
            check_distance(d)?;
        }
        if k == Some(0) {
            return Err(Error::Parameter("k must be at least 1".into()));
        }
        if let Some(beta) = beta {
            cores::check_beta(beta)?;
        }
        Ok(Self { algorithm, d, k, beta })
    }

    pub fn rain(d: f64) -> Result<Self> {
        Self::new(Algorithm::Rain, Some(d), None, None)
    }

    pub fn zqs(d: f64) -> Result<Self> {
        Self::new(Algorithm::ZQuickshift, Some(d), None, None)
    }

    pub fn gdqs(d: f64, k: usize) -> Result<Self> {
        Self::new(Algorithm::GdQuickshift, Some(d), Some(k), None)
    }

    pub fn gdqspp(k: usize, beta: f64) -> Result<Self> {
        Self::new(Algorithm::GdQuickshiftPP, None, Some(k), Some(beta))
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn d(&self) -> Option<f64> {
        self.d
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    /// Same algorithm with a different `d`.
    pub fn with_d(&self, d: f64) -> Result<Self> {
        Self::new(self.algorithm, Some(d), self.k, self.beta)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.algorithm)?;
        if let Some(d) = self.d {
            write!(f, " d={d}")?;
        }
        if let Some(k) = self.k {
            write!(f, " k={k}")?;
        }
        if let Some(beta) = self.beta {
            write!(f, " beta={beta}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_distance(d: f64) -> Result<()> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Parameter(format!("d must be positive and finite, got {d}")));
    }
    Ok(())
}

/// Clusters `cloud` with the chosen algorithm. Labels are consecutive from 1.
///
/// An empty cloud yields an empty labeling for every algorithm.
pub fn cluster(cloud: &PointCloud, params: &Params) -> Result<Labeling> {
    if cloud.is_empty() {
        return Ok(Labeling::default());
    }
    // Params can only be built through `new`, so the unwraps below hold.
    match params.algorithm {
        Algorithm::Rain => {
            let index = KdTree3::build(cloud.positions_3d())?;
            forest_to_labels(&rain::rain_with_index(&index, params.d.unwrap()))
        }
        Algorithm::ZQuickshift => {
            let index = KdTree3::build(cloud.positions_3d())?;
            forest_to_labels(&zquickshift::zqs_with_index(&index, params.d.unwrap()))
        }
        Algorithm::GdQuickshift => {
            require_two_points(cloud, params.algorithm)?;
            let index = KdTree2::build(cloud.positions_2d())?;
            let density = density::density_with_index(&index, params.k.unwrap())?;
            forest_to_labels(&gdqs::gdqs_with_index(&index, params.d.unwrap(), &density))
        }
        Algorithm::GdQuickshiftPP => {
            require_two_points(cloud, params.algorithm)?;
            let index2 = KdTree2::build(cloud.positions_2d())?;
            let density = density::density_with_index(&index2, params.k.unwrap())?;
            let cores = cores::cores_with_index(&index2, &density, params.beta.unwrap());
            drop(index2);
            let core_of = cores.membership(cloud.len())?;
            let index3 = KdTree3::build(cloud.positions_3d())?;
            gdqspp::assign_with_index(&index3, &density, &core_of)
        }
    }
}

fn require_two_points(cloud: &PointCloud, algorithm: Algorithm) -> Result<()> {
    if cloud.len() < 2 {
        return Err(Error::Data(format!(
            "{} needs at least 2 points, got {}",
            algorithm.name(),
            cloud.len()
        )));
    }
    Ok(())
}
