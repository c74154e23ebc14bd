//! Multidimensional projection toolkit.
//!
//! Two projection methods map an `n × D` feature matrix to a 2-D layout:
//!
//! * [`tsne`]: t-distributed stochastic neighbor embedding with per-point
//!   perplexity calibration and momentum gradient descent on the KL cost.
//! * [`lsp`]: least-square projection, which places k-medoids control points
//!   with classical MDS and interpolates the remaining points by solving a
//!   sparse neighborhood-Laplacian least-squares system.
//!
//! [`pca`] is available standalone and as a preprocessing stage for t-SNE.
//! [`metrics`] scores an embedding against class labels (silhouette and the
//! neighborhood-hit curve), and [`sweep`] and [`report`] run parameter grids
//! and serialize the results.

pub mod dataset;
pub mod error;
pub mod lsp;
pub mod metrics;
pub mod numerics;
pub mod pca;
pub mod report;
pub mod sweep;
pub mod synth;
pub mod tsne;

pub use dataset::{DataMatrix, DistanceKind, DistanceMatrix, LabelVector};
pub use error::{Error, Result};
pub use metrics::{Embedding, MetricsReport};
