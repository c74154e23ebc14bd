//! Principal component analysis on the sample covariance matrix.

use crate::dataset::{center_columns, DataMatrix};
use crate::error::{Error, Result};
use crate::numerics::symmetric_eigen;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Orthonormal directions in input space, strongest first.
    pub components: Vec<Vec<f64>>,
    /// Sample variance along each component, descending.
    pub variances: Vec<f64>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    /// Maps projected coordinates back to input space.
    pub fn reconstruct(&self, y: &DataMatrix) -> Result<DataMatrix> {
        if y.ncols() != self.output_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.output_dim(),
                found: y.ncols(),
            });
        }
        let mut values = Vec::with_capacity(y.nrows() * self.input_dim());
        for row in y.rows_iter() {
            let mut x = self.mean.clone();
            for (coef, v) in row.iter().zip(&self.components) {
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi += coef * vi;
                }
            }
            values.extend(x);
        }
        DataMatrix::new(y.nrows(), self.input_dim(), values)
    }
}

/// Fits `d` principal components (covariance divisor `n − 1`).
///
/// Each component is signed so that its largest-magnitude entry is positive.
/// Fails if any requested variance is at or below `1e-12` times the largest.
pub fn fit(x: &DataMatrix, d: usize) -> Result<PcaModel> {
    let n = x.nrows();
    let dim = x.ncols();
    if d == 0 || n < 2 || d > (n - 1).min(dim) {
        return Err(Error::InvalidParameter(format!(
            "PCA target dimension {d} must be in 1..={} for {n} samples of dimension {dim}",
            n.saturating_sub(1).min(dim)
        )));
    }
    let (centered, mean) = center_columns(x);
    let mut cov = vec![0.0; dim * dim];
    for r in centered.rows_iter() {
        for i in 0..dim {
            let ri = r[i];
            if ri == 0.0 {
                continue;
            }
            let row = &mut cov[i * dim..(i + 1) * dim];
            for j in i..dim {
                row[j] += ri * r[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..dim {
        for j in i..dim {
            let v = cov[i * dim + j] / denom;
            cov[i * dim + j] = v;
            cov[j * dim + i] = v;
        }
    }

    let eig = symmetric_eigen(&cov, dim, d)?;
    let largest = eig.eigenvalues[0];
    if largest <= 0.0 {
        return Err(Error::ZeroVariance { component: 0 });
    }
    if let Some(c) = eig.eigenvalues.iter().position(|&v| v <= 1e-12 * largest) {
        return Err(Error::ZeroVariance { component: c });
    }

    let components = eig
        .eigenvectors
        .into_iter()
        .map(|mut v| {
            let pivot = v.iter().fold(0.0f64, |best, &x| if x.abs() > best.abs() { x } else { best });
            if pivot < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    Ok(PcaModel {
        mean,
        components,
        variances: eig.eigenvalues,
    })
}

/// Projects rows onto the model: `y_ij = v_j · (x_i − mean)`.
pub fn transform(x: &DataMatrix, model: &PcaModel) -> Result<DataMatrix> {
    if x.ncols() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            found: x.ncols(),
        });
    }
    let mut values = Vec::with_capacity(x.nrows() * model.output_dim());
    let mut centered = vec![0.0; x.ncols()];
    for r in x.rows_iter() {
        for ((c, v), m) in centered.iter_mut().zip(r).zip(&model.mean) {
            *c = v - m;
        }
        values.extend(
            model
                .components
                .iter()
                .map(|comp| comp.iter().zip(&centered).map(|(a, b)| a * b).sum::<f64>()),
        );
    }
    DataMatrix::new(x.nrows(), model.output_dim(), values)
}

pub fn fit_transform(x: &DataMatrix, d: usize) -> Result<(PcaModel, DataMatrix)> {
    let model = fit(x, d)?;
    let y = transform(x, &model)?;
    Ok((model, y))
}
