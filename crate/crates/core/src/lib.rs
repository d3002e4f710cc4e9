//! Scalable pre-clustering of crop-field point clouds.
//!
//! A field reconstruction is split into clusters that roughly correspond to
//! individual plants. Four mode-seeking algorithms are provided, all of them
//! built as a parent forest over a kD-tree index:
//!
//! | algorithm            | parameters | idea                                              |
//! |----------------------|------------|---------------------------------------------------|
//! | non-random RAIN      | `d`        | link to the lowest point within `d`               |
//! | Z-Quickshift         | `d`        | link to the nearest strictly lower point within `d` |
//! | GD Quickshift        | `d`, `k`   | Quickshift on the ground-plane k-NN density       |
//! | GD Quickshift++      | `k`, `beta`| dense 2D cores, remaining points climb in 3D      |
//!
//! ```
//! use cropseg::{cluster, Algorithm, Params, FieldSpec, generate_field};
//!
//! let spec = FieldSpec { rows: 2, cols: 2, points_per_plant: 200, ..FieldSpec::default() };
//! let field = generate_field(&spec).unwrap();
//! let params = Params::new(Algorithm::GdQuickshiftPP, None, Some(100), Some(0.3)).unwrap();
//! let labels = cluster(&field, &params).unwrap();
//! assert_eq!(labels.len(), field.len());
//! ```
//!
//! The `cropseg` binary wraps the same pipeline (`cluster`, `eval`, `synth`,
//! `bench`); see [`cli`].

pub mod bench;
pub mod cli;
pub mod cluster;
mod error;
pub mod eval;
pub mod pointcloud;
pub mod spatial;
pub mod synth;

pub use cluster::{cluster, Algorithm, CoreSet, DensityField, Params, ParentForest};
pub use error::{Error, Result};
pub use eval::{count_report, iou, match_clusters, CountReport, MatchReport};
pub use pointcloud::{color_to_label, label_to_color, load_ply, save_ply, Labeling, Point3, PointCloud};
pub use spatial::KdTree;
pub use synth::{generate_field, generate_plant, FieldSpec};
