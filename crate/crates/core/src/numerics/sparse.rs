use crate::error::{Error, Result};

const RELATIVE_TOLERANCE: f64 = 1e-10;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets. Duplicates, out-of-range
    /// indices and non-finite values are rejected.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for (k, &(r, c, v)) in triplets.iter().enumerate() {
            if r >= rows || c >= cols {
                return Err(Error::InvalidParameter(format!(
                    "entry ({r},{c}) outside a {rows}x{cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
            if k > 0 && triplets[k - 1].0 == r && triplets[k - 1].1 == c {
                return Err(Error::InvalidParameter(format!("duplicate entry ({r},{c})")));
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(col, value)` pairs of row `r`, ascending by column.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(col, _)| col == c).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (r, &yr) in y.iter().enumerate() {
            for (c, v) in self.row(r) {
                out[c] += v * yr;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.rows * self.cols];
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                d[r * self.cols + c] = v;
            }
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖AᵀA x − Aᵀb‖ / ‖Aᵀb‖`, recomputed from scratch at exit.
    pub relative_residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normal_residual(a: &SparseMatrix, atb: &[f64], x: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    let atax = a.tr_mul_vec(&ax);
    atb.iter().zip(&atax).map(|(p, q)| p - q).collect()
}

/// Minimizes `‖Ax − b‖²` by conjugate gradient on the normal equations
/// `AᵀA x = Aᵀb`, without forming `AᵀA`.
///
/// Converges when the true normal-equation residual drops to `1e-10·‖Aᵀb‖`;
/// at most `10·n` iterations. Empty columns, CG breakdown and stagnation
/// are reported as rank deficiency.
pub fn sparse_least_squares(a: &SparseMatrix, b: &[f64]) -> Result<LeastSquaresSolution> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.len(),
        });
    }
    let n = a.ncols();
    let mut col_used = vec![false; n];
    for r in 0..a.nrows() {
        for (c, v) in a.row(r) {
            if v != 0.0 {
                col_used[c] = true;
            }
        }
    }
    if let Some(c) = col_used.iter().position(|u| !u) {
        return Err(Error::RankDeficient {
            detail: format!("column {c} has no nonzero entries"),
            residual: f64::NAN,
        });
    }

    let atb = a.tr_mul_vec(b);
    let atb_norm = norm(&atb);
    let mut x = vec![0.0; n];
    if atb_norm == 0.0 {
        return Ok(LeastSquaresSolution {
            x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let target = RELATIVE_TOLERANCE * atb_norm;
    let max_iter = 10 * n;

    let mut r = atb.clone();
    let mut p = r.clone();
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let mut iterations = 0;
    while iterations < max_iter {
        if rr.sqrt() <= target {
            // guard against drift of the recursive residual
            r = normal_residual(a, &atb, &x);
            rr = r.iter().map(|v| v * v).sum();
            if rr.sqrt() <= target {
                break;
            }
            p.clone_from(&r);
        }
        let ap = a.mul_vec(&p);
        let pap: f64 = ap.iter().map(|v| v * v).sum();
        let pp: f64 = p.iter().map(|v| v * v).sum();
        if pap <= f64::EPSILON * f64::EPSILON * pp {
            return Err(Error::RankDeficient {
                detail: format!("conjugate-gradient breakdown at iteration {iterations}"),
                residual: rr.sqrt() / atb_norm,
            });
        }
        let alpha = rr / pap;
        let atap = a.tr_mul_vec(&ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * atap[i];
        }
        let rr_next: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_next / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
        iterations += 1;
    }

    let relative_residual = norm(&normal_residual(a, &atb, &x)) / atb_norm;
    if relative_residual > RELATIVE_TOLERANCE {
        return Err(Error::RankDeficient {
            detail: format!("residual stagnated after {iterations} iterations"),
            residual: relative_residual,
        });
    }
    Ok(LeastSquaresSolution {
        x,
        iterations,
        relative_residual,
    })
}
