use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 200;

/// Top eigenpairs of a symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    /// Unit-norm eigenvectors, `eigenvectors[i]` pairs with `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi eigensolver on a dense row-major `size × size` matrix.
///
/// Returns the `k` largest eigenpairs. Each pair is checked against
/// `‖Mv − λv‖ ≤ 1e-6·max(1, |λ|)` before returning.
pub fn symmetric_eigen(m: &[f64], size: usize, k: usize) -> Result<EigenResult> {
    if m.len() != size * size {
        return Err(Error::DimensionMismatch {
            expected: size * size,
            found: m.len(),
        });
    }
    if k == 0 || k > size {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenpairs of a {size}x{size} matrix"
        )));
    }
    let scale = m.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut asym = 0.0f64;
    for i in 0..size {
        for j in 0..i {
            asym = asym.max((m[i * size + j] - m[j * size + i]).abs());
        }
    }
    if asym > 1e-9 * scale {
        return Err(Error::NotSymmetric(asym));
    }

    let n = size;
    // symmetrize exactly so rotations preserve symmetry
    let mut a: Vec<f64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            0.5 * (m[i * n + j] + m[j * n + i])
        })
        .collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let frob2: f64 = a.iter().map(|x| x * x).sum();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum();
        if off <= 1e-30 * frob2 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = c * arp - s * arq;
                    a[r * n + q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[p * n + r];
                    let aqr = a[q * n + r];
                    a[p * n + r] = c * apr - s * aqr;
                    a[q * n + r] = s * apr + c * aqr;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // descending by eigenvalue, lowest index on ties
    order.sort_by(|&x, &y| a[y * n + y].total_cmp(&a[x * n + x]).then(x.cmp(&y)));
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    for &col in order.iter().take(k) {
        let lambda = a[col * n + col];
        let mut vec: Vec<f64> = (0..n).map(|r| v[r * n + col]).collect();
        let norm = vec.iter().map(|x| x * x).sum::<f64>().sqrt();
        vec.iter_mut().for_each(|x| *x /= norm);

        let residual = (0..n)
            .map(|r| {
                let mv: f64 = (0..n).map(|c| m[r * n + c] * vec[c]).sum();
                (mv - lambda * vec[r]).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        if residual > 1e-6 * lambda.abs().max(1.0) {
            return Err(Error::NoConvergence {
                what: "jacobi eigensolver",
                residual,
            });
        }
        eigenvalues.push(lambda);
        eigenvectors.push(vec);
    }
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = rng.random_range(-1.0..1.0);
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
        m
    }

    fn assert_orthonormal(r: &EigenResult) {
        for (i, a) in r.eigenvectors.iter().enumerate() {
            for (j, b) in r.eigenvectors.iter().enumerate() {
                let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() <= 1e-8, "v{i}.v{j} = {d}");
            }
        }
    }

    #[test]
    fn diagonal_matrix() {
        let r = symmetric_eigen(&[1.0, 0.0, 0.0, 3.0], 2, 2).unwrap();
        assert_eq!(r.eigenvalues, vec![3.0, 1.0]);
        assert_eq!(r.eigenvectors[0][0].abs(), 0.0);
        assert_eq!(r.eigenvectors[0][1].abs(), 1.0);
        assert_eq!(r.eigenvectors[1][0].abs(), 1.0);
    }

    #[test]
    fn swap_matrix() {
        let r = symmetric_eigen(&[0.0, 1.0, 1.0, 0.0], 2, 2).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((r.eigenvalues[1] + 1.0).abs() < 1e-12);
        let h = 1.0 / 2f64.sqrt();
        let v0 = &r.eigenvectors[0];
        let v1 = &r.eigenvectors[1];
        assert!((v0[0].abs() - h).abs() < 1e-12 && (v0[0] - v0[1]).abs() < 1e-12);
        assert!((v1[0].abs() - h).abs() < 1e-12 && (v1[0] + v1[1]).abs() < 1e-12);
    }

    #[test]
    fn matches_dense_reference_solver() {
        for seed in 0..5 {
            let n = 8;
            let m = random_symmetric(n, seed);
            let r = symmetric_eigen(&m, n, n).unwrap();
            assert_orthonormal(&r);

            let dense = nalgebra::DMatrix::from_row_slice(n, n, &m);
            let mut want: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
            want.sort_by(|a, b| b.total_cmp(a));
            for (got, want) in r.eigenvalues.iter().zip(&want) {
                assert!((got - want).abs() < 1e-6, "{got} vs {want}");
            }
            for (lambda, v) in r.eigenvalues.iter().zip(&r.eigenvectors) {
                for row in 0..n {
                    let mv: f64 = (0..n).map(|c| m[row * n + c] * v[c]).sum();
                    assert!((mv - lambda * v[row]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn top_k_subset_is_sorted() {
        let m = random_symmetric(12, 42);
        let r = symmetric_eigen(&m, 12, 4).unwrap();
        assert_eq!(r.eigenvalues.len(), 4);
        assert!(r.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert_orthonormal(&r);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            symmetric_eigen(&[1.0, 2.0, 0.0, 1.0], 2, 1),
            Err(Error::NotSymmetric(_))
        ));
        assert!(symmetric_eigen(&[1.0], 1, 2).is_err());
        assert!(symmetric_eigen(&[1.0], 1, 0).is_err());
    }
}
