//! Seeded synthetic labeled datasets for benchmarks and tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{DataMatrix, LabelVector};
use crate::error::{Error, Result};

/// Isotropic Gaussian blobs whose centers form a regular simplex: every pair
/// of centers is exactly `separation` apart.
#[derive(Debug, Clone, PartialEq)]
pub struct BlobSpec {
    pub blobs: usize,
    pub per_blob: usize,
    pub dim: usize,
    pub sigma: f64,
    pub separation: f64,
    pub seed: u64,
}

impl BlobSpec {
    /// `blobs` clusters of `per_blob` points in `dim` dimensions, unit spread,
    /// centers ten spreads apart.
    pub fn standard(blobs: usize, per_blob: usize, dim: usize, seed: u64) -> Self {
        Self {
            blobs,
            per_blob,
            dim,
            sigma: 1.0,
            separation: 10.0,
            seed,
        }
    }
}

pub fn gaussian_blobs(spec: &BlobSpec) -> Result<(DataMatrix, LabelVector)> {
    if spec.blobs == 0 || spec.per_blob == 0 {
        return Err(Error::InvalidParameter("blob count and size must be positive".into()));
    }
    if spec.blobs > spec.dim {
        return Err(Error::InvalidParameter(format!(
            "{} simplex centers need at least {} dimensions",
            spec.blobs, spec.blobs
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let offset = spec.separation / 2f64.sqrt();
    let n = spec.blobs * spec.per_blob;
    let mut values = Vec::with_capacity(n * spec.dim);
    let mut codes = Vec::with_capacity(n);
    for b in 0..spec.blobs {
        for _ in 0..spec.per_blob {
            for k in 0..spec.dim {
                let z: f64 = StandardNormal.sample(&mut rng);
                let center = if k == b { offset } else { 0.0 };
                values.push(center + spec.sigma * z);
            }
            codes.push(b);
        }
    }
    let names = (0..spec.blobs).map(|b| format!("blob{b}")).collect();
    Ok((DataMatrix::new(n, spec.dim, values)?, LabelVector::with_names(codes, names)?))
}

/// Class structure in `informative` features plus high-variance noise features.
///
/// Class means `class_spread · Q e_c` use a random orthonormal `Q`, so the
/// between-class variance spans `classes − 1` directions of the informative
/// block, with eigenvalues near `class_spread² / classes`. The noise columns
/// are independent of the class and, when `noise_sigma²` exceeds those
/// eigenvalues, outrank every informative direction in PCA.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyFeatureSpec {
    pub classes: usize,
    pub per_class: usize,
    pub informative: usize,
    pub noise: usize,
    pub class_spread: f64,
    pub within_sigma: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl NoisyFeatureSpec {
    /// 10 classes, 40 informative and 20 noise columns.
    pub fn standard(per_class: usize, seed: u64) -> Self {
        Self {
            classes: 10,
            per_class,
            informative: 40,
            noise: 20,
            class_spread: 70f64.sqrt(),
            within_sigma: 0.5,
            noise_sigma: 3.0,
            seed,
        }
    }
}

pub fn noisy_features(spec: &NoisyFeatureSpec) -> Result<(DataMatrix, LabelVector)> {
    if spec.classes == 0 || spec.per_class == 0 {
        return Err(Error::InvalidParameter("class count and size must be positive".into()));
    }
    if spec.classes > spec.informative {
        return Err(Error::InvalidParameter(format!(
            "{} classes need at least {} informative columns",
            spec.classes, spec.classes
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = spec.informative;

    // Gram-Schmidt on Gaussian columns gives an m × classes orthonormal basis
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(spec.classes);
    while basis.len() < spec.classes {
        let mut v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        for u in &basis {
            let proj: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= proj * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|a| *a /= norm);
            basis.push(v);
        }
    }

    let dim = m + spec.noise;
    let n = spec.classes * spec.per_class;
    let mut values = Vec::with_capacity(n * dim);
    let mut codes = Vec::with_capacity(n);
    for c in 0..spec.classes {
        for _ in 0..spec.per_class {
            for k in 0..m {
                let z: f64 = StandardNormal.sample(&mut rng);
                values.push(spec.class_spread * basis[c][k] + spec.within_sigma * z);
            }
            for _ in 0..spec.noise {
                let z: f64 = StandardNormal.sample(&mut rng);
                values.push(spec.noise_sigma * z);
            }
            codes.push(c);
        }
    }
    let names = (0..spec.classes).map(|c| format!("class{c}")).collect();
    Ok((DataMatrix::new(n, dim, values)?, LabelVector::with_names(codes, names)?))
}
