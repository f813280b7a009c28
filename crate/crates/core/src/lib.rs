//! Centroid decision forests for high-dimensional classification.
//!
//! A centroid decision tree scores a random candidate subset of features at
//! each node by class separability (mean gap over pooled spread), keeps the
//! top scorers, places one centroid per class in that reduced space and
//! routes samples to their nearest centroid. A forest bags many such trees
//! over bootstrap samples and predicts by majority vote.
//!
//! The crate is generic over the feature scalar (`f32` or `f64`, see
//! [`Scalar`]); the aliases below fix common choices. Everything is
//! deterministic given a seed: per-tree random streams derive from the
//! master seed and tree index, so parallel and serial training produce
//! identical models.

pub mod cdt;
pub mod css;
pub mod dataset;
pub mod error;
pub mod forest;
pub mod harness;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod scalar;

pub use cdt::{MSelector, TreeConfig, TreeNode};
pub use dataset::Dataset;
pub use error::{CdfError, Result};
pub use forest::{Forest, ForestConfig};
pub use harness::{EvalProtocol, EvalReport, SweepParam};
pub use matrix::Matrix;
pub use scalar::Scalar;

pub type DatasetF32 = Dataset<f32>;
pub type DatasetF64 = Dataset<f64>;
pub type ForestF32 = Forest<f32>;
pub type ForestF64 = Forest<f64>;
pub type MatrixF32 = Matrix<f32>;
pub type MatrixF64 = Matrix<f64>;
