use super::eigen::symmetric_eigen;
use crate::dataset::DistanceMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MdsResult {
    /// Row-major `n × dim` coordinates, centered at the origin.
    pub coords: Vec<f64>,
    pub dim: usize,
    /// Set when every input distance is zero; coordinates are then all zero.
    pub degenerate: bool,
}

impl MdsResult {
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
}

/// Classical (Torgerson) MDS.
///
/// Double-centers `-½ D²`, takes the top `dim` eigenpairs and scales each
/// eigenvector by `√λ`. Non-positive eigenvalues give a zero-width axis.
/// Each axis is oriented so its largest-magnitude coordinate is positive.
pub fn classical_mds(d: &DistanceMatrix, dim: usize) -> Result<MdsResult> {
    let n = d.len();
    if dim == 0 {
        return Err(Error::InvalidParameter("MDS target dimension must be >= 1".into()));
    }
    if n < dim + 1 {
        return Err(Error::InvalidParameter(format!(
            "MDS into {dim} dimensions needs at least {} points, got {n}",
            dim + 1
        )));
    }
    if d.as_slice().iter().all(|&v| v == 0.0) {
        return Ok(MdsResult {
            coords: vec![0.0; n * dim],
            dim,
            degenerate: true,
        });
    }

    let sq = d.squared();
    let row_mean: Vec<f64> = sq.chunks_exact(n).map(|r| r.iter().sum::<f64>() / n as f64).collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            // D² is symmetric so column means equal row means
            b[i * n + j] = -0.5 * (sq[i * n + j] - row_mean[i] - row_mean[j] + grand);
        }
    }

    let eig = symmetric_eigen(&b, n, dim)?;
    let mut coords = vec![0.0; n * dim];
    for (axis, (lambda, v)) in eig.eigenvalues.iter().zip(&eig.eigenvectors).enumerate() {
        let scale = lambda.max(0.0).sqrt();
        let pivot = v
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, x)| if x.abs() > best.1.abs() { (i, *x) } else { best });
        let sign = if pivot.1 < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            coords[i * dim + axis] = sign * scale * v[i];
        }
    }
    for axis in 0..dim {
        let mean = (0..n).map(|i| coords[i * dim + axis]).sum::<f64>() / n as f64;
        for i in 0..n {
            coords[i * dim + axis] -= mean;
        }
    }
    Ok(MdsResult {
        coords,
        dim,
        degenerate: false,
    })
}
