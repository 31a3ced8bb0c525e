//! Isolation forests and random cut forests with density-aware split sampling.
//!
//! The crate builds four kinds of partition trees over multisets of points:
//! isolation trees (IF), random cut trees (RRCF), and a density-aware variant
//! of each (WIF, WRCF) that avoids splitting inside dense clusters. Trees are
//! combined into forests and scored with path-length anomaly scores or
//! collusive displacement (CODISP). Random cut trees also support streaming
//! insertion and deletion for sliding-window time-series scoring.
//!
//! ```
//! use cutforest::{Dataset, AlgorithmKind, ensemble::{BaggingConfig, bagged_forest}};
//!
//! let x = Dataset::from_scalars(&[0.0, 1.0, 2.0, 3.0, 40.0]).unwrap();
//! let config = BaggingConfig::new(AlgorithmKind::Wrcf, 5, 5).with_seed(7);
//! let scores = bagged_forest(&x, &config).unwrap().avg_codisp().unwrap();
//! let top = scores.iter().enumerate().max_by(|a, b| a.1.unwrap().total_cmp(&b.1.unwrap())).unwrap().0;
//! assert_eq!(top, 4);
//! ```

pub mod bench;
pub mod cli;
pub mod dataset;
pub mod density;
pub mod ensemble;
pub mod error;
pub mod rng;
pub mod score;
pub mod stream;
pub mod tree;

pub use dataset::{BoundingBox, Dataset, Points, Projection};
pub use density::DensityParams;
pub use error::{Error, Result};
pub use tree::{AlgorithmKind, DimensionCutLaw, NodeId, SplitSampler, Tree};
