//! Least-square projection.
//!
//! Control points are the medoids of a k-medoids clustering, placed in the
//! plane by classical MDS. Every point is asked to sit at the centroid of its
//! neighbors (a row of the Laplacian `L`), control points are additionally
//! pinned to their MDS positions (rows of `C`), and the stacked system
//! `[L; C] x = [0; x_c]` is solved in the least-squares sense once per output
//! coordinate.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::dataset::{pairwise_distances, DataMatrix, DistanceKind, DistanceMatrix, LabelVector};
use crate::error::{Error, Result};
use crate::metrics::Embedding;
use crate::numerics::{classical_mds, k_medoids, sparse_least_squares, MedoidAssignment, SparseMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct LspConfig {
    pub num_control_points: usize,
    pub num_neighbors: usize,
    pub distance: DistanceKind,
    pub out_dim: usize,
    pub seed: u64,
}

impl Default for LspConfig {
    fn default() -> Self {
        Self {
            num_control_points: 25,
            num_neighbors: 10,
            distance: DistanceKind::Euclidean,
            out_dim: 2,
            seed: 0,
        }
    }
}

impl LspConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        let nc = self.num_control_points;
        let k = self.num_neighbors;
        if nc == 0 || nc > n {
            return Err(Error::InvalidParameter(format!(
                "control point count {nc} must be in 1..={n}"
            )));
        }
        if k == 0 || k >= n {
            return Err(Error::InvalidParameter(format!(
                "neighbor count {k} must be in 1..{n}"
            )));
        }
        if self.out_dim == 0 {
            return Err(Error::InvalidParameter("output dimension must be >= 1".into()));
        }
        if nc < self.out_dim + 1 {
            return Err(Error::InvalidParameter(format!(
                "{nc} control points cannot seed a {}-dimensional layout",
                self.out_dim
            )));
        }
        Ok(())
    }
}

/// Directed neighbor lists `V_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodGraph {
    pub neighbors: Vec<Vec<usize>>,
}

impl NeighborhoodGraph {
    pub fn new(neighbors: Vec<Vec<usize>>) -> Result<Self> {
        let n = neighbors.len();
        for (i, v) in neighbors.iter().enumerate() {
            if v.is_empty() {
                return Err(Error::Invariant(format!("point {i} has no neighbors")));
            }
            let mut seen = v.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != v.len() || v.contains(&i) || v.iter().any(|&j| j >= n) {
                return Err(Error::Invariant(format!("invalid neighbor list for point {i}")));
            }
        }
        Ok(Self { neighbors })
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlPointSet {
    pub indices: Vec<usize>,
    /// Row-major `nc × out_dim`.
    pub coords: Vec<f64>,
    pub out_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianSystem {
    /// `(n + nc) × n`: Laplacian rows, then one unit row per control point.
    pub a: SparseMatrix,
    /// One right-hand side per output coordinate, each of length `n + nc`.
    pub rhs: Vec<Vec<f64>>,
}

/// Medoids of a k-medoids clustering with `nc` clusters, plus the clustering.
pub fn select_control_points(d: &DistanceMatrix, nc: usize, seed: u64) -> Result<(Vec<usize>, MedoidAssignment)> {
    let assignment = k_medoids(d, nc, seed)?;
    Ok((assignment.medoids.clone(), assignment))
}

/// Classical MDS of the control points' distance submatrix.
pub fn project_control_points(dc: &DistanceMatrix, out_dim: usize) -> Result<Vec<f64>> {
    let mds = classical_mds(dc, out_dim)?;
    if mds.degenerate {
        return Err(Error::Degenerate("all control points coincide".into()));
    }
    Ok(mds.coords)
}

fn k_nearest(d: &DistanceMatrix, i: usize, candidates: impl Iterator<Item = usize>, k: usize) -> Vec<usize> {
    let row = d.row(i);
    let mut c: Vec<(f64, usize)> = candidates.filter(|&j| j != i).map(|j| (row[j], j)).collect();
    c.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    c.truncate(k);
    c.into_iter().map(|(_, j)| j).collect()
}

/// Neighbor search restricted to the point's own cluster plus the cluster
/// whose medoid is nearest to its medoid. Falls back to an exact global
/// search when that candidate pool holds fewer than `k` other points.
pub fn build_neighborhoods(d: &DistanceMatrix, assignment: &MedoidAssignment, k: usize) -> Result<NeighborhoodGraph> {
    let n = d.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("neighbor count {k} must be in 1..{n}")));
    }
    let medoids = &assignment.medoids;
    let nc = medoids.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for (i, &c) in assignment.assignment.iter().enumerate() {
        members[c].push(i);
    }
    let nearest_other: Vec<Option<usize>> = (0..nc)
        .map(|c| {
            (0..nc)
                .filter(|&o| o != c)
                .min_by(|&a, &b| {
                    d.get(medoids[c], medoids[a])
                        .total_cmp(&d.get(medoids[c], medoids[b]))
                        .then(a.cmp(&b))
                })
        })
        .collect();

    let neighbors = (0..n)
        .into_par_iter()
        .map(|i| {
            let c = assignment.assignment[i];
            let extra = nearest_other[c].map_or(&[][..], |o| &members[o][..]);
            if members[c].len() - 1 + extra.len() >= k {
                k_nearest(d, i, members[c].iter().chain(extra).copied(), k)
            } else {
                k_nearest(d, i, 0..n, k)
            }
        })
        .collect();
    NeighborhoodGraph::new(neighbors)
}

/// Exact global k-nearest-neighbor lists (ties to the lower index).
pub fn exact_neighborhoods(d: &DistanceMatrix, k: usize) -> Result<NeighborhoodGraph> {
    let n = d.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("neighbor count {k} must be in 1..{n}")));
    }
    NeighborhoodGraph::new((0..n).into_par_iter().map(|i| k_nearest(d, i, 0..n, k)).collect())
}

/// Stacks the uniform-weight Laplacian (`α_ij = 1/k_i`) over the control-point
/// selector rows and builds one right-hand side per output coordinate.
pub fn assemble_system(graph: &NeighborhoodGraph, controls: &ControlPointSet, n: usize) -> Result<LaplacianSystem> {
    if graph.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: graph.len(),
        });
    }
    let nc = controls.indices.len();
    if controls.coords.len() != nc * controls.out_dim {
        return Err(Error::DimensionMismatch {
            expected: nc * controls.out_dim,
            found: controls.coords.len(),
        });
    }
    let mut triplets = Vec::with_capacity(n + nc + graph.neighbors.iter().map(Vec::len).sum::<usize>());
    for (i, v) in graph.neighbors.iter().enumerate() {
        triplets.push((i, i, 1.0));
        let alpha = 1.0 / v.len() as f64;
        triplets.extend(v.iter().map(|&j| (i, j, -alpha)));
    }
    for (t, &c) in controls.indices.iter().enumerate() {
        if c >= n {
            return Err(Error::InvalidParameter(format!("control index {c} out of range")));
        }
        triplets.push((n + t, c, 1.0));
    }
    let a = SparseMatrix::from_triplets(n + nc, n, triplets)?;
    let rhs = (0..controls.out_dim)
        .map(|axis| {
            let mut b = vec![0.0; n + nc];
            for t in 0..nc {
                b[n + t] = controls.coords[t * controls.out_dim + axis];
            }
            b
        })
        .collect();
    Ok(LaplacianSystem { a, rhs })
}

/// The stacked system has full column rank exactly when every point reaches
/// some control point by following neighbor links. Reports one unreachable
/// point and how many share its fate otherwise.
pub fn check_anchored(graph: &NeighborhoodGraph, control_indices: &[usize]) -> Result<()> {
    let n = graph.len();
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, v) in graph.neighbors.iter().enumerate() {
        for &j in v {
            reverse[j].push(i);
        }
    }
    let mut reached = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &c in control_indices {
        if !reached[c] {
            reached[c] = true;
            queue.push_back(c);
        }
    }
    while let Some(j) = queue.pop_front() {
        for &i in &reverse[j] {
            if !reached[i] {
                reached[i] = true;
                queue.push_back(i);
            }
        }
    }
    let orphans: Vec<usize> = (0..n).filter(|&i| !reached[i]).collect();
    if let Some(&first) = orphans.first() {
        return Err(Error::RankDeficient {
            detail: format!(
                "{} point(s), e.g. point {first}, have no neighbor path to a control point",
                orphans.len()
            ),
            residual: f64::NAN,
        });
    }
    Ok(())
}

/// Intermediate products of one projection.
#[derive(Debug, Clone, PartialEq)]
pub struct LspTrace {
    pub controls: ControlPointSet,
    pub clustering: MedoidAssignment,
    pub graph: NeighborhoodGraph,
    pub solver_iterations: Vec<usize>,
    pub solver_residuals: Vec<f64>,
}

pub fn run(x: &DataMatrix, labels: &LabelVector, config: &LspConfig) -> Result<Embedding> {
    run_with_trace(x, labels, config).map(|(e, _)| e)
}

pub fn run_with_trace(x: &DataMatrix, labels: &LabelVector, config: &LspConfig) -> Result<(Embedding, LspTrace)> {
    let n = x.nrows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    config.validate(n)?;
    let d = pairwise_distances(x, config.distance)?;
    let (indices, clustering) = select_control_points(&d, config.num_control_points, config.seed)?;
    let coords = project_control_points(&d.submatrix(&indices), config.out_dim)?;
    let controls = ControlPointSet {
        indices,
        coords,
        out_dim: config.out_dim,
    };
    let graph = build_neighborhoods(&d, &clustering, config.num_neighbors)?;
    check_anchored(&graph, &controls.indices)?;
    let system = assemble_system(&graph, &controls, n)?;

    let solves = system
        .rhs
        .par_iter()
        .enumerate()
        .map(|(axis, b)| {
            sparse_least_squares(&system.a, b).map_err(|e| match e {
                Error::RankDeficient { detail, residual } => Error::RankDeficient {
                    detail: format!("output coordinate {axis}: {detail}"),
                    residual,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let dim = config.out_dim;
    let mut values = vec![0.0; n * dim];
    for (axis, s) in solves.iter().enumerate() {
        for i in 0..n {
            values[i * dim + axis] = s.x[i];
        }
    }
    let embedding = Embedding::new(DataMatrix::new(n, dim, values)?, labels.clone())?;
    let trace = LspTrace {
        controls,
        clustering,
        graph,
        solver_iterations: solves.iter().map(|s| s.iterations).collect(),
        solver_residuals: solves.iter().map(|s| s.relative_residual).collect(),
    };
    Ok((embedding, trace))
}
