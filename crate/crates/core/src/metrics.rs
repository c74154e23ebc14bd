//! Projection quality: silhouette coefficient and neighborhood-hit curve.
//!
//! Both metrics measure Euclidean distance in the embedding space, whatever
//! distance was used on the input features.

use rayon::prelude::*;

use crate::dataset::{squared_euclidean, DataMatrix, LabelVector};
use crate::error::{Error, Result};

/// Default largest neighborhood size for hit curves in reports.
pub const DEFAULT_HIT_K_MAX: usize = 30;

/// Low-dimensional coordinates with the class labels of their source rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub coords: DataMatrix,
    pub labels: LabelVector,
}

impl Embedding {
    pub fn new(coords: DataMatrix, labels: LabelVector) -> Result<Self> {
        if coords.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: coords.nrows(),
                found: labels.len(),
            });
        }
        Ok(Self { coords, labels })
    }

    pub fn len(&self) -> usize {
        self.coords.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.coords.row(i)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub silhouette: f64,
    /// `(k, mean hit rate)` for `k = 1..=k_max`.
    pub hit_curve: Vec<(usize, f64)>,
}

pub fn evaluate(emb: &Embedding, k_max: usize) -> Result<MetricsReport> {
    Ok(MetricsReport {
        silhouette: silhouette(emb)?,
        hit_curve: neighborhood_hit_curve(emb, k_max)?,
    })
}

/// Mean silhouette over all points.
///
/// Points alone in their class contribute 0, as do points whose `a` and `b`
/// are both zero.
pub fn silhouette(emb: &Embedding) -> Result<f64> {
    let n = emb.len();
    let classes = emb.labels.num_classes();
    let mut counts = vec![0usize; classes];
    for &c in emb.labels.codes() {
        counts[c] += 1;
    }
    if n < 2 || counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::SingleLabel);
    }

    let scores: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let own = emb.labels.code(i);
            if counts[own] == 1 {
                return 0.0;
            }
            let pi = emb.point(i);
            let mut sums = vec![0.0; classes];
            for j in 0..n {
                if j != i {
                    sums[emb.labels.code(j)] += squared_euclidean(pi, emb.point(j)).sqrt();
                }
            }
            let a = sums[own] / (counts[own] - 1) as f64;
            let b = (0..classes)
                .filter(|&c| c != own && counts[c] > 0)
                .map(|c| sums[c] / counts[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom > 0.0 {
                (b - a) / denom
            } else {
                0.0
            }
        })
        .collect();
    Ok(scores.iter().sum::<f64>() / n as f64)
}

/// Fraction of each point's `k` nearest embedded neighbors sharing its label,
/// averaged over points, for every `k` in `1..=k_max`. Self is excluded and
/// distance ties go to the lower index.
pub fn neighborhood_hit_curve(emb: &Embedding, k_max: usize) -> Result<Vec<(usize, f64)>> {
    let n = emb.len();
    if k_max == 0 || k_max >= n {
        return Err(Error::InvalidParameter(format!(
            "hit curve k_max must be in 1..{n}, got {k_max}"
        )));
    }
    let per_point: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let pi = emb.point(i);
            let mut others: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (squared_euclidean(pi, emb.point(j)), j))
                .collect();
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            others.select_nth_unstable_by(k_max - 1, cmp);
            others.truncate(k_max);
            others.sort_unstable_by(cmp);
            let own = emb.labels.code(i);
            let mut hits = 0u32;
            others
                .iter()
                .map(|&(_, j)| {
                    hits += u32::from(emb.labels.code(j) == own);
                    hits
                })
                .collect()
        })
        .collect();

    Ok((1..=k_max)
        .map(|k| {
            let total: f64 = per_point.iter().map(|h| h[k - 1] as f64 / k as f64).sum();
            (k, total / n as f64)
        })
        .collect())
}
