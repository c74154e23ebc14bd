use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::DistanceMatrix;
use crate::error::{Error, Result};

const MAX_ROUNDS: usize = 100;

/// Number of seeded initializations tried by [`k_medoids`].
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct MedoidAssignment {
    /// Medoid point indices, ascending. Cluster `c` is the one around `medoids[c]`.
    pub medoids: Vec<usize>,
    /// Cluster id per point.
    pub assignment: Vec<usize>,
    /// Sum of point-to-medoid distances.
    pub cost: f64,
    /// Cost after every assignment step of the winning restart.
    pub cost_history: Vec<f64>,
}

impl MedoidAssignment {
    pub fn num_clusters(&self) -> usize {
        self.medoids.len()
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c == cluster).then_some(i))
            .collect()
    }
}

/// Alternating (Voronoi-iteration) k-medoids, best of [`DEFAULT_RESTARTS`] seeded starts.
pub fn k_medoids(d: &DistanceMatrix, k: usize, seed: u64) -> Result<MedoidAssignment> {
    k_medoids_with_restarts(d, k, seed, DEFAULT_RESTARTS)
}

pub fn k_medoids_with_restarts(
    d: &DistanceMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<MedoidAssignment> {
    let n = d.len();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k-medoids needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<MedoidAssignment> = None;
    for _ in 0..restarts.max(1) {
        let init = sample(&mut rng, n, k).into_vec();
        let run = alternate(d, init);
        if best.as_ref().is_none_or(|b| run.cost < b.cost) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn alternate(d: &DistanceMatrix, mut medoids: Vec<usize>) -> MedoidAssignment {
    medoids.sort_unstable();
    let (mut assignment, mut cost) = assign(d, &medoids);
    let mut cost_history = vec![cost];
    for _ in 0..MAX_ROUNDS {
        let mut next = update(d, &medoids, &assignment);
        next.sort_unstable();
        if next == medoids {
            break;
        }
        medoids = next;
        (assignment, cost) = assign(d, &medoids);
        cost_history.push(cost);
    }
    MedoidAssignment {
        medoids,
        assignment,
        cost,
        cost_history,
    }
}

/// Nearest medoid per point; a medoid always belongs to its own cluster.
fn assign(d: &DistanceMatrix, medoids: &[usize]) -> (Vec<usize>, f64) {
    let n = d.len();
    let mut assignment = vec![0; n];
    let mut cost = 0.0;
    for (i, slot) in assignment.iter_mut().enumerate() {
        if let Some(own) = medoids.iter().position(|&m| m == i) {
            *slot = own;
            continue;
        }
        let row = d.row(i);
        let (c, dist) = medoids
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (c, &m)| {
                if row[m] < best.1 {
                    (c, row[m])
                } else {
                    best
                }
            });
        *slot = c;
        cost += dist;
    }
    (assignment, cost)
}

fn update(d: &DistanceMatrix, medoids: &[usize], assignment: &[usize]) -> Vec<usize> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); medoids.len()];
    for (i, &c) in assignment.iter().enumerate() {
        members[c].push(i);
    }
    members
        .iter()
        .map(|m| {
            // members are in ascending index order, so strict < keeps the lowest index
            let mut best = (m[0], f64::INFINITY);
            for &candidate in m {
                let row = d.row(candidate);
                let total: f64 = m.iter().map(|&j| row[j]).sum();
                if total < best.1 {
                    best = (candidate, total);
                }
            }
            best.0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{pairwise_distances, DataMatrix, DistanceKind};

    fn exhaustive_optimum(d: &DistanceMatrix, k: usize) -> f64 {
        fn rec(d: &DistanceMatrix, k: usize, start: usize, chosen: &mut Vec<usize>, best: &mut f64) {
            if chosen.len() == k {
                let cost: f64 = (0..d.len())
                    .map(|i| chosen.iter().map(|&m| d.get(i, m)).fold(f64::INFINITY, f64::min))
                    .sum();
                *best = best.min(cost);
                return;
            }
            for m in start..d.len() {
                chosen.push(m);
                rec(d, k, m + 1, chosen, best);
                chosen.pop();
            }
        }
        let mut best = f64::INFINITY;
        rec(d, k, 0, &mut Vec::new(), &mut best);
        best
    }

    fn line(points: &[f64]) -> DistanceMatrix {
        let rows: Vec<Vec<f64>> = points.iter().map(|&p| vec![p]).collect();
        pairwise_distances(&DataMatrix::from_rows(&rows).unwrap(), DistanceKind::Euclidean).unwrap()
    }

    #[test]
    fn line_with_two_groups() {
        let d = line(&[0.0, 1.0, 10.0, 11.0]);
        assert_eq!(exhaustive_optimum(&d, 2), 2.0);
        for seed in 0..5 {
            let r = k_medoids(&d, 2, seed).unwrap();
            assert_eq!(r.cost, 2.0);
            assert!(r.medoids[0] <= 1 && r.medoids[1] >= 2, "{:?}", r.medoids);
            assert_eq!(r.assignment, vec![0, 0, 1, 1]);
        }
    }

    #[test]
    fn k_equals_n_is_zero_cost() {
        let d = line(&[0.0, 3.0, 7.0, 8.0, 20.0]);
        let r = k_medoids(&d, 5, 1).unwrap();
        assert_eq!(r.medoids, vec![0, 1, 2, 3, 4]);
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn duplicate_points_keep_medoids_in_own_cluster() {
        let d = line(&[1.0, 1.0, 1.0, 5.0]);
        let r = k_medoids(&d, 3, 9).unwrap();
        for (c, &m) in r.medoids.iter().enumerate() {
            assert_eq!(r.assignment[m], c);
        }
    }

    #[test]
    fn cost_never_increases_and_is_deterministic() {
        let pts: Vec<f64> = (0..40).map(|i| ((i * 37) % 23) as f64 * 1.3 + (i % 3) as f64 * 20.0).collect();
        let d = line(&pts);
        let a = k_medoids(&d, 4, 3).unwrap();
        let b = k_medoids(&d, 4, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.cost_history.windows(2).all(|w| w[1] <= w[0]));
        for (i, &c) in a.assignment.iter().enumerate() {
            let mine = d.get(i, a.medoids[c]);
            assert!(a.medoids.iter().all(|&m| d.get(i, m) >= mine));
        }
    }

    #[test]
    fn rejects_bad_k() {
        let d = line(&[0.0, 1.0]);
        assert!(k_medoids(&d, 0, 0).is_err());
        assert!(k_medoids(&d, 3, 0).is_err());
    }
}
