//! t-distributed stochastic neighbor embedding (exact, O(n²) per iteration).
//!
//! High-dimensional similarities are Gaussian conditionals whose bandwidths
//! are calibrated per point to a target perplexity, symmetrized into a joint
//! distribution `P`. Low-dimensional similarities `Q` use a Student-t kernel
//! with one degree of freedom, normalized over all distinct pairs. The layout
//! minimizes `KL(P‖Q)` by momentum gradient descent with early exaggeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::dataset::{pairwise_distances, DataMatrix, DistanceKind, LabelVector};
use crate::error::{Error, Result};
use crate::metrics::Embedding;
use crate::pca;

/// Floor for probabilities inside logarithms.
pub const PROB_FLOOR: f64 = 1e-12;
/// Replaces zero squared distances between distinct points during calibration.
pub const DUPLICATE_EPSILON: f64 = 1e-12;
const PERPLEXITY_TOLERANCE: f64 = 1e-5;
const MAX_BISECTIONS: usize = 200;
const COST_TAIL: usize = 100;
const COST_STRIDE: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub momentum_initial: f64,
    pub momentum_final: f64,
    pub momentum_switch_iter: usize,
    pub exaggeration_factor: f64,
    pub exaggeration_iters: usize,
    pub out_dim: usize,
    /// Standard deviation of the Gaussian initial layout.
    pub init_scale: f64,
    pub seed: u64,
    /// Input-space distance; squared before calibration.
    pub distance: DistanceKind,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            momentum_initial: 0.5,
            momentum_final: 0.8,
            momentum_switch_iter: 250,
            exaggeration_factor: 4.0,
            exaggeration_iters: 100,
            out_dim: 2,
            init_scale: 1e-2,
            seed: 0,
            distance: DistanceKind::Euclidean,
        }
    }
}

impl TsneConfig {
    /// Checks parameter ranges; `n` is the number of points to embed.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.perplexity > 1.0) {
            return bad(format!("perplexity must exceed 1, got {}", self.perplexity));
        }
        if self.perplexity >= n as f64 {
            return bad(format!(
                "perplexity {} must be below the number of points {n}",
                self.perplexity
            ));
        }
        if !(self.learning_rate > 0.0) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        for (name, m) in [("initial", self.momentum_initial), ("final", self.momentum_final)] {
            if !(0.0..1.0).contains(&m) {
                return bad(format!("{name} momentum must be in [0, 1), got {m}"));
            }
        }
        if !(self.exaggeration_factor >= 1.0) {
            return bad(format!("exaggeration factor must be >= 1, got {}", self.exaggeration_factor));
        }
        if self.exaggeration_iters > self.iterations {
            return bad(format!(
                "exaggeration iterations {} exceed total iterations {}",
                self.exaggeration_iters, self.iterations
            ));
        }
        if self.out_dim == 0 {
            return bad("output dimension must be >= 1".into());
        }
        if !(self.init_scale > 0.0) {
            return bad(format!("init scale must be positive, got {}", self.init_scale));
        }
        Ok(())
    }
}

/// Symmetric `n × n` probability matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl AffinityMatrix {
    pub fn from_dense(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        let m = Self { n, values };
        m.validate()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Exact symmetry, exact zero diagonal, entries in `[0, 1]`, mass `1 ± 1e-9`.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) != 0.0 {
                return Err(Error::Invariant(format!("affinity diagonal ({i},{i}) is nonzero")));
            }
            for j in 0..i {
                let v = self.get(i, j);
                if v != self.get(j, i) {
                    return Err(Error::Invariant(format!("affinity ({i},{j}) is not symmetric")));
                }
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Invariant(format!("affinity ({i},{j}) = {v} outside [0,1]")));
                }
            }
        }
        let total = self.total();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Invariant(format!("affinity mass {total} differs from 1")));
        }
        Ok(())
    }
}

/// Calibrated Gaussian bandwidths and the perplexity each one achieves.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaVector {
    pub sigmas: Vec<f64>,
    pub perplexities: Vec<f64>,
}

/// Fills `out` with the Gaussian conditional row of point `i` for precision
/// `beta = 1/(2σ²)` and returns its perplexity. `out[i]` is 0.
fn gaussian_row(d2: &[f64], i: usize, beta: f64, out: &mut [f64]) -> Result<f64> {
    let min = d2
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(Error::Degenerate(format!("point {i} has no neighbor at finite distance")));
    }
    let mut z = 0.0;
    for (j, (o, &v)) in out.iter_mut().zip(d2).enumerate() {
        *o = if j == i { 0.0 } else { (-(v - min) * beta).exp() };
        z += *o;
    }
    let mut h = 0.0;
    for o in out.iter_mut() {
        *o /= z;
        if *o > 0.0 {
            h -= *o * o.log2();
        }
    }
    Ok(h.exp2())
}

/// Gaussian conditional `p_{j|i}` over one squared-distance row.
pub fn conditional_probabilities(d2_row: &[f64], i: usize, sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if d2_row.len() < 2 || i >= d2_row.len() {
        return Err(Error::Degenerate("conditional row needs at least one neighbor".into()));
    }
    let mut out = vec![0.0; d2_row.len()];
    gaussian_row(d2_row, i, 1.0 / (2.0 * sigma * sigma), &mut out)?;
    Ok(out)
}

/// `2^H` of a probability row, entropy in bits.
pub fn row_perplexity(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum();
    h.exp2()
}

fn floored_row(d2: &[f64], n: usize, i: usize) -> Vec<f64> {
    d2[i * n..(i + 1) * n]
        .iter()
        .enumerate()
        .map(|(j, &v)| if j != i && v == 0.0 { DUPLICATE_EPSILON } else { v })
        .collect()
}

fn calibrate_row(row: &[f64], i: usize, target: f64) -> Result<(f64, f64)> {
    let mut buf = vec![0.0; row.len()];
    let mut perp_at = |sigma: f64| gaussian_row(row, i, 1.0 / (2.0 * sigma * sigma), &mut buf);

    let p1 = perp_at(1.0)?;
    if (p1 - target).abs() <= PERPLEXITY_TOLERANCE {
        return Ok((1.0, p1));
    }
    let unreachable = || {
        Error::Degenerate(format!(
            "perplexity {target} is unreachable for point {i}"
        ))
    };
    let (mut lo, mut hi) = if p1 < target {
        let (mut lo, mut hi) = (1.0, 2.0);
        while perp_at(hi)? < target {
            lo = hi;
            hi *= 2.0;
            if hi > 1e150 {
                return Err(unreachable());
            }
        }
        (lo, hi)
    } else {
        let (mut lo, mut hi) = (0.5, 1.0);
        while perp_at(lo)? > target {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-150 {
                return Err(unreachable());
            }
        }
        (lo, hi)
    };

    let mut best = (lo, f64::INFINITY, 0.0);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let p = perp_at(mid)?;
        let err = (p - target).abs();
        if err < best.1 {
            best = (mid, err, p);
        }
        if err <= PERPLEXITY_TOLERANCE || mid == lo || mid == hi {
            break;
        }
        if p < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.1 > 1e-4 {
        return Err(Error::NoConvergence {
            what: "perplexity bisection",
            residual: best.1,
        });
    }
    Ok((best.0, best.2))
}

/// Per-point bandwidth search so that `2^H(P_i)` matches `perplexity`.
///
/// `d2` is the row-major squared distance matrix. Zero distances between
/// distinct points are raised to [`DUPLICATE_EPSILON`].
pub fn calibrate_sigmas(d2: &[f64], n: usize, perplexity: f64) -> Result<SigmaVector> {
    if d2.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: d2.len(),
        });
    }
    if !(perplexity > 1.0 && perplexity < n as f64) {
        return Err(Error::InvalidParameter(format!(
            "perplexity must lie in (1, {n}), got {perplexity}"
        )));
    }
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| calibrate_row(&floored_row(d2, n, i), i, perplexity))
        .collect::<Result<_>>()?;
    let (sigmas, perplexities) = rows.into_iter().unzip();
    Ok(SigmaVector { sigmas, perplexities })
}

/// Row-major matrix of conditionals `p_{j|i}` for the given bandwidths.
pub fn conditional_matrix(d2: &[f64], n: usize, sigmas: &[f64]) -> Result<Vec<f64>> {
    if sigmas.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: sigmas.len(),
        });
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| conditional_probabilities(&floored_row(d2, n, i), i, sigmas[i]))
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

/// `p_ij = (p_{j|i} + p_{i|j}) / 2n`.
pub fn joint_affinities(conditionals: &[f64], n: usize) -> AffinityMatrix {
    let mut values = vec![0.0; n * n];
    let denom = 2.0 * n as f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (conditionals[i * n + j] + conditionals[j * n + i]) / denom;
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    AffinityMatrix { n, values }
}

/// Student-t kernel `(1 + ‖y_i − y_j‖²)⁻¹` with zero diagonal and its total.
/// Each row is accumulated in index order, rows summed in order.
fn student_kernel(y: &[f64], n: usize, dim: usize) -> (Vec<f64>, f64) {
    let rows: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let yi = &y[i * dim..(i + 1) * dim];
            let mut row = vec![0.0; n];
            let mut sum = 0.0;
            for (j, w) in row.iter_mut().enumerate() {
                if j == i {
                    continue;
                }
                let yj = &y[j * dim..(j + 1) * dim];
                let d2: f64 = yi.iter().zip(yj).map(|(a, b)| (a - b) * (a - b)).sum();
                *w = 1.0 / (1.0 + d2);
                sum += *w;
            }
            (row, sum)
        })
        .collect();
    let z = rows.iter().map(|(_, s)| s).sum();
    let w = rows.into_iter().flat_map(|(r, _)| r).collect();
    (w, z)
}

/// `q_ij`, normalized over all distinct ordered pairs.
pub fn low_dim_affinities(y: &[f64], n: usize, dim: usize) -> Result<AffinityMatrix> {
    if y.len() != n * dim {
        return Err(Error::DimensionMismatch {
            expected: n * dim,
            found: y.len(),
        });
    }
    if n < 2 {
        return Err(Error::Degenerate("need at least two points".into()));
    }
    let (w, z) = student_kernel(y, n, dim);
    Ok(AffinityMatrix {
        n,
        values: w.into_iter().map(|v| v / z).collect(),
    })
}

/// `KL(P‖Q)` in nats. Zero `p` terms contribute nothing; both sides are
/// floored at [`PROB_FLOOR`] inside the logarithm.
pub fn kl_cost(p: &AffinityMatrix, q: &AffinityMatrix) -> f64 {
    p.values
        .iter()
        .zip(&q.values)
        .filter(|&(&pv, _)| pv > 0.0)
        .map(|(&pv, &qv)| pv * (pv.max(PROB_FLOOR) / qv.max(PROB_FLOOR)).ln())
        .sum()
}

fn gradient_with_kernel(
    p: &[f64],
    exaggeration: f64,
    w: &[f64],
    z: f64,
    y: &[f64],
    n: usize,
    dim: usize,
) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let yi = &y[i * dim..(i + 1) * dim];
            let mut g = vec![0.0; dim];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let wij = w[i * n + j];
                let coef = (exaggeration * p[i * n + j] - wij / z) * wij;
                let yj = &y[j * dim..(j + 1) * dim];
                for k in 0..dim {
                    g[k] += coef * (yi[k] - yj[k]);
                }
            }
            g.iter_mut().for_each(|v| *v *= 4.0);
            g
        })
        .collect();
    rows.concat()
}

/// `∂C/∂y_i = 4 Σ_j (p_ij − q_ij)(y_i − y_j)(1 + ‖y_i − y_j‖²)⁻¹`, row-major `n × dim`.
///
/// `q` must be the affinity matrix of this `y`; the kernel is recovered from it.
pub fn gradient(p: &AffinityMatrix, q: &AffinityMatrix, y: &[f64], dim: usize) -> Vec<f64> {
    let n = p.len();
    let (w, z) = student_kernel(y, n, dim);
    debug_assert!(q.values.iter().zip(&w).all(|(qv, wv)| (qv - wv / z).abs() <= 1e-12));
    gradient_with_kernel(&p.values, 1.0, &w, z, y, n, dim)
}

/// Optimization diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TsneTrace {
    pub sigmas: SigmaVector,
    /// `(iteration, KL cost)` every 50 iterations and for each of the final 100.
    pub costs: Vec<(usize, f64)>,
    /// Largest |mean coordinate| observed after re-centering.
    pub max_centroid_drift: f64,
}

fn recenter(y: &mut [f64], n: usize, dim: usize) -> f64 {
    for k in 0..dim {
        let mean = (0..n).map(|i| y[i * dim + k]).sum::<f64>() / n as f64;
        for i in 0..n {
            y[i * dim + k] -= mean;
        }
    }
    (0..dim)
        .map(|k| ((0..n).map(|i| y[i * dim + k]).sum::<f64>() / n as f64).abs())
        .fold(0.0, f64::max)
}

/// Embeds `x`, optionally after PCA to `pca_dims`. Labels pass through.
pub fn run(
    x: &DataMatrix,
    labels: &LabelVector,
    config: &TsneConfig,
    pca_dims: Option<usize>,
) -> Result<Embedding> {
    run_with_trace(x, labels, config, pca_dims).map(|(e, _)| e)
}

pub fn run_with_trace(
    x: &DataMatrix,
    labels: &LabelVector,
    config: &TsneConfig,
    pca_dims: Option<usize>,
) -> Result<(Embedding, TsneTrace)> {
    let n = x.nrows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    config.validate(n)?;
    let reduced;
    let input = match pca_dims {
        Some(d) => {
            if d > x.ncols() {
                return Err(Error::InvalidParameter(format!(
                    "pca_dims {d} exceeds input dimension {}",
                    x.ncols()
                )));
            }
            reduced = pca::fit_transform(x, d)?.1;
            &reduced
        }
        None => x,
    };

    let d2 = pairwise_distances(input, config.distance)?.squared();
    let sigmas = calibrate_sigmas(&d2, n, config.perplexity)?;
    let p = joint_affinities(&conditional_matrix(&d2, n, &sigmas.sigmas)?, n);
    p.validate()?;
    drop(d2);

    let dim = config.out_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normal = Normal::new(0.0, config.init_scale)
        .map_err(|e| Error::InvalidParameter(format!("init scale: {e}")))?;
    let mut y: Vec<f64> = (0..n * dim).map(|_| normal.sample(&mut rng)).collect();
    let mut max_drift = recenter(&mut y, n, dim);
    let mut velocity = vec![0.0; n * dim];
    let mut costs = Vec::new();

    let iters = config.iterations;
    for it in 0..iters {
        let (w, z) = student_kernel(&y, n, dim);
        if it % COST_STRIDE == 0 || it + COST_TAIL >= iters {
            let q = AffinityMatrix {
                n,
                values: w.iter().map(|v| v / z).collect(),
            };
            q.validate()?;
            costs.push((it, kl_cost(&p, &q)));
        }
        let exaggeration = if it < config.exaggeration_iters {
            config.exaggeration_factor
        } else {
            1.0
        };
        let grad = gradient_with_kernel(&p.values, exaggeration, &w, z, &y, n, dim);
        let momentum = if it < config.momentum_switch_iter {
            config.momentum_initial
        } else {
            config.momentum_final
        };
        for ((v, g), yv) in velocity.iter_mut().zip(&grad).zip(y.iter_mut()) {
            *v = momentum * *v - config.learning_rate * g;
            *yv += *v;
        }
        let drift = recenter(&mut y, n, dim);
        if drift > 1e-9 {
            return Err(Error::Invariant(format!("embedding centroid drifted by {drift:e}")));
        }
        max_drift = max_drift.max(drift);
    }

    let coords = DataMatrix::new(n, dim, y)?;
    let embedding = Embedding::new(coords, labels.clone())?;
    Ok((
        embedding,
        TsneTrace {
            sigmas,
            costs,
            max_centroid_drift: max_drift,
        },
    ))
}
