//! Numerical kernels shared by PCA and LSP: symmetric eigendecomposition,
//! classical MDS, k-medoids and sparse least squares.

mod eigen;
mod kmedoids;
mod mds;
mod sparse;

pub use eigen::{symmetric_eigen, EigenResult};
pub use kmedoids::{k_medoids, k_medoids_with_restarts, MedoidAssignment, DEFAULT_RESTARTS};
pub use mds::{classical_mds, MdsResult};
pub use sparse::{sparse_least_squares, LeastSquaresSolution, SparseMatrix};
