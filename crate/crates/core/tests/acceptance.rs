//! End-to-end acceptance checks. Each test writes one `[acceptance N] ... PASS|FAIL`
//! line straight to stdout (bypassing libtest capture) before asserting.

use std::io::Write;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::seq::{index::sample, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use projlab::dataset::{pairwise_distances, DataMatrix, DistanceKind, DistanceMatrix, LabelVector};
use projlab::lsp::{self, assemble_system, check_anchored, exact_neighborhoods, ControlPointSet, LspConfig};
use projlab::metrics::{neighborhood_hit_curve, silhouette, Embedding};
use projlab::numerics::{classical_mds, k_medoids, sparse_least_squares};
use projlab::report::render_embedding_csv;
use projlab::sweep::{run_sweep_on, write_outputs, CellParams, SweepConfig, SweepOutcome};
use projlab::synth::{gaussian_blobs, noisy_features, BlobSpec, NoisyFeatureSpec};
use projlab::tsne::{
    self, calibrate_sigmas, conditional_probabilities, gradient, joint_affinities, conditional_matrix, kl_cost,
    low_dim_affinities, AffinityMatrix, TsneConfig,
};

fn verdict(id: u32, what: &str, ok: bool, detail: &str) {
    let line = format!(
        "[acceptance {id:>2}] {what}: {} ({detail})\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(ok, "{}", line.trim_end());
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn embedding_from(rows: &[Vec<f64>], codes: &[usize]) -> Embedding {
    Embedding::new(
        DataMatrix::from_rows(rows).unwrap(),
        LabelVector::from_codes(codes.to_vec()).unwrap(),
    )
    .unwrap()
}

fn sweep_config(text: &str) -> SweepConfig {
    SweepConfig::from_map(&projlab::sweep::parse_config_text(text).unwrap()).unwrap()
}

fn cell_score(outcome: &SweepOutcome, pred: impl Fn(&CellParams) -> bool) -> f64 {
    let cell = outcome.cells.iter().find(|c| pred(&c.params)).expect("cell present");
    cell.row
        .silhouette
        .unwrap_or_else(|| panic!("cell {} failed: {:?}", cell.params.name(), cell.row.error))
}

// KL(P||Q) written out independently of the library's cost routine.
fn kl_reference(p: &[f64], y: &[f64], n: usize, dim: usize) -> f64 {
    let mut w = vec![0.0; n * n];
    let mut z = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d2: f64 = (0..dim).map(|k| (y[i * dim + k] - y[j * dim + k]).powi(2)).sum();
                w[i * n + j] = 1.0 / (1.0 + d2);
                z += w[i * n + j];
            }
        }
    }
    (0..n * n)
        .filter(|&t| p[t] > 0.0)
        .map(|t| p[t] * (p[t] / (w[t] / z)).ln())
        .sum()
}

#[test]
fn gradient_matches_central_differences() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (n, dim, h) = (8usize, 2usize, 1e-5);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v: f64 = rng.random_range(0.05..1.0);
                p[i * n + j] = v;
                p[j * n + i] = v;
            }
        }
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= total);
        let pm = AffinityMatrix::from_dense(n, p.clone()).unwrap();
        let y: Vec<f64> = (0..n * dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let q = low_dim_affinities(&y, n, dim).unwrap();
        let g = gradient(&pm, &q, &y, dim);
        assert!((kl_cost(&pm, &q) - kl_reference(&p, &y, n, dim)).abs() < 1e-12);
        for t in 0..n * dim {
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[t] += h;
            ym[t] -= h;
            let fd = (kl_reference(&p, &yp, n, dim) - kl_reference(&p, &ym, n, dim)) / (2.0 * h);
            let rel = (g[t] - fd).abs() / g[t].abs().max(fd.abs()).max(1e-8);
            worst = worst.max(rel);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        1,
        "t-SNE gradient vs central differences",
        worst <= 1e-4 && secs < 5.0,
        &format!("max relative error {worst:.2e}, {secs:.2}s"),
    );
}

#[test]
fn perplexity_calibration_hits_targets() {
    let start = Instant::now();
    let (x, _) = gaussian_blobs(&BlobSpec::standard(4, 50, 10, 5)).unwrap();
    let n = x.nrows();
    let d2 = pairwise_distances(&x, DistanceKind::Euclidean).unwrap().squared();
    let mut worst = 0.0f64;
    for target in [5.0, 20.0, 30.0, 40.0] {
        let s = calibrate_sigmas(&d2, n, target).unwrap();
        for i in 0..n {
            let row = conditional_probabilities(&d2[i * n..(i + 1) * n], i, s.sigmas[i]).unwrap();
            let h: f64 = row.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum();
            worst = worst.max((h.exp2() - target).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        2,
        "perplexity calibration on 200 points",
        worst <= 1e-3 && secs < 5.0,
        &format!("max |perplexity - target| {worst:.2e}, {secs:.2}s"),
    );
}

fn affinity_defect(m: &AffinityMatrix) -> f64 {
    let n = m.len();
    let mut worst = (m.as_slice().iter().sum::<f64>() - 1.0).abs();
    for i in 0..n {
        worst = worst.max(m.get(i, i).abs());
        for j in 0..n {
            worst = worst.max((m.get(i, j) - m.get(j, i)).abs());
        }
    }
    worst
}

#[test]
fn affinities_are_symmetric_unit_mass() {
    let (x, labels) = gaussian_blobs(&BlobSpec::standard(3, 40, 10, 9)).unwrap();
    let n = x.nrows();
    let d2 = pairwise_distances(&x, DistanceKind::Euclidean).unwrap().squared();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for target in [5.0, 20.0, 30.0, 40.0] {
        let s = calibrate_sigmas(&d2, n, target).unwrap();
        let p = joint_affinities(&conditional_matrix(&d2, n, &s.sigmas).unwrap(), n);
        worst = worst.max(affinity_defect(&p));
        checked += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for scale in [1e-4, 1e-2, 1.0, 100.0] {
        let y: Vec<f64> = (0..n * 2).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        worst = worst.max(affinity_defect(&low_dim_affinities(&y, n, 2).unwrap()));
        checked += 1;
    }
    // runs validate every materialized P and Q internally and fail otherwise
    let cfg = TsneConfig {
        perplexity: 20.0,
        iterations: 300,
        seed: 4,
        ..TsneConfig::default()
    };
    let (emb, trace) = tsne::run_with_trace(&x, &labels, &cfg, None).unwrap();
    let q_final = low_dim_affinities(emb.coords.as_slice(), n, 2).unwrap();
    worst = worst.max(affinity_defect(&q_final));
    checked += 1;
    verdict(
        3,
        "P and Q symmetric, zero diagonal, unit mass",
        worst <= 1e-9,
        &format!(
            "{checked} matrices, worst defect {worst:.2e}; run validated {} Q matrices",
            trace.costs.len()
        ),
    );
}

#[test]
fn sparse_solver_matches_dense_pseudoinverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    let mut worst_row = 0.0f64;
    let mut systems = 0;
    while systems < 20 {
        let n = rng.random_range(6..=50);
        let nc = rng.random_range(3..=10.min(n - 1));
        let k = rng.random_range(1..=6.min(n - 1));
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
        let d = pairwise_distances(&DataMatrix::from_rows(&rows).unwrap(), DistanceKind::Euclidean).unwrap();
        let graph = exact_neighborhoods(&d, k).unwrap();
        let indices = sample(&mut rng, n, nc).into_vec();
        if check_anchored(&graph, &indices).is_err() {
            continue;
        }
        let controls = ControlPointSet {
            coords: (0..nc * 2).map(|_| rng.random_range(-1.0..1.0)).collect(),
            indices,
            out_dim: 2,
        };
        let sys = assemble_system(&graph, &controls, n).unwrap();
        let (m, cols) = (sys.a.nrows(), sys.a.ncols());
        let dense = DMatrix::from_row_slice(m, cols, &sys.a.to_dense());
        let sv = dense.clone().svd(false, false).singular_values;
        assert!(sv.min() > 1e-10, "sampled system is rank deficient");
        let pinv = dense.clone().pseudo_inverse(1e-12).unwrap();
        for r in 0..n {
            worst_row = worst_row.max(sys.a.row(r).map(|(_, v)| v).sum::<f64>().abs());
        }
        for b in &sys.rhs {
            let got = sparse_least_squares(&sys.a, b).unwrap().x;
            let want = &pinv * nalgebra::DVector::from_column_slice(b);
            for (g, w) in got.iter().zip(want.iter()) {
                worst = worst.max((g - w).abs());
            }
        }
        systems += 1;
    }
    verdict(
        4,
        "sparse least squares vs dense pseudoinverse",
        worst <= 1e-6 && worst_row <= 1e-12,
        &format!("{systems} systems, max |x - x*| {worst:.2e}, max Laplacian row sum {worst_row:.2e}"),
    );
}

fn exhaustive_medoid_cost(d: &DistanceMatrix, k: usize) -> f64 {
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

#[test]
fn k_medoids_near_exhaustive_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst_ratio = 0.0f64;
    for t in 0..10 {
        let n = rng.random_range(4..=12);
        let k = rng.random_range(1..=3);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)]).collect();
        let d = pairwise_distances(&DataMatrix::from_rows(&rows).unwrap(), DistanceKind::Euclidean).unwrap();
        let got = k_medoids(&d, k, t).unwrap().cost;
        worst_ratio = worst_ratio.max(got / exhaustive_medoid_cost(&d, k));
    }
    let mut blob_exact = true;
    for seed in 0..5 {
        let (x, _) = gaussian_blobs(&BlobSpec::standard(3, 4, 3, seed)).unwrap();
        let d = pairwise_distances(&x, DistanceKind::Euclidean).unwrap();
        blob_exact &= k_medoids(&d, 3, seed).unwrap().cost == exhaustive_medoid_cost(&d, 3);
    }
    verdict(
        5,
        "k-medoids vs exhaustive optimum",
        worst_ratio <= 1.05 && blob_exact,
        &format!("worst cost ratio {worst_ratio:.4}, separated blobs exact: {blob_exact}"),
    );
}

#[test]
fn classical_mds_reconstructs_square_and_pair() {
    let square = [vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
    let d = pairwise_distances(&DataMatrix::from_rows(&square).unwrap(), DistanceKind::Euclidean).unwrap();
    let mds = classical_mds(&d, 2).unwrap();
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((euclid(mds.point(i), mds.point(j)) - d.get(i, j)).abs());
        }
    }
    let pair = DistanceMatrix::from_dense(2, vec![0.0, 3.0, 3.0, 0.0]).unwrap();
    let two = classical_mds(&pair, 1).unwrap();
    let mut coords = [two.point(0)[0], two.point(1)[0]];
    coords.sort_by(f64::total_cmp);
    let pair_ok = (coords[0] + 1.5).abs() < 1e-12 && (coords[1] - 1.5).abs() < 1e-12;
    verdict(
        6,
        "classical MDS",
        worst <= 1e-9 && pair_ok,
        &format!("square max distance error {worst:.2e}, pair coords {coords:?}"),
    );
}

#[test]
fn three_blob_benchmark() {
    let start = Instant::now();
    let (x, labels) = gaussian_blobs(&BlobSpec::standard(3, 100, 10, 7)).unwrap();
    let t = tsne::run(
        &x,
        &labels,
        &TsneConfig {
            perplexity: 20.0,
            iterations: 1000,
            seed: 7,
            ..TsneConfig::default()
        },
        None,
    )
    .unwrap();
    let l = lsp::run(
        &x,
        &labels,
        &LspConfig {
            num_control_points: 25,
            num_neighbors: 10,
            seed: 7,
            ..LspConfig::default()
        },
    )
    .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (st, sl) = (silhouette(&t).unwrap(), silhouette(&l).unwrap());
    let ht = neighborhood_hit_curve(&t, 10).unwrap()[9].1;
    let hl = neighborhood_hit_curve(&l, 10).unwrap()[9].1;
    verdict(
        7,
        "3-blob benchmark",
        st >= 0.7 && sl >= 0.5 && ht >= 0.95 && hl >= 0.95 && secs < 30.0,
        &format!("t-SNE silhouette {st:.4} hit10 {ht:.4}; LSP silhouette {sl:.4} hit10 {hl:.4}; {secs:.1}s"),
    );
}

fn ten_blobs() -> (DataMatrix, LabelVector) {
    gaussian_blobs(&BlobSpec::standard(10, 100, 10, 11)).unwrap()
}

fn lsp_grid(x: &DataMatrix, labels: &LabelVector, seed: u64) -> SweepOutcome {
    let cfg = sweep_config(&format!(
        "input = -\nmethod = lsp\ncontrol_points = 25, 50, 75\nneighbors = 10, 20\nseed = {seed}\nout = -\n"
    ));
    run_sweep_on(x, labels, &cfg)
}

fn best_cell(outcome: &SweepOutcome) -> (String, f64, Vec<(usize, f64)>) {
    let cell = outcome
        .cells
        .iter()
        .filter(|c| c.row.silhouette.is_some())
        .max_by(|a, b| a.row.silhouette.unwrap().total_cmp(&b.row.silhouette.unwrap()))
        .expect("at least one successful cell");
    (cell.params.name(), cell.row.silhouette.unwrap(), cell.hit_curve.clone().unwrap())
}

#[test]
fn tsne_outperforms_lsp_on_ten_blobs() {
    let (x, labels) = ten_blobs();
    let lsp_out = lsp_grid(&x, &labels, 11);
    let tsne_cfg = sweep_config(
        "input = -\nmethod = tsne\nperplexity = 20, 30, 40\niterations = 1000, 1500\nseed = 11\nout = -\n",
    );
    let tsne_out = run_sweep_on(&x, &labels, &tsne_cfg);
    let (ln, ls, lc) = best_cell(&lsp_out);
    let (tn, ts, tc) = best_cell(&tsne_out);
    let dominated_at: Vec<usize> = tc.iter().zip(&lc).filter(|(t, l)| t.1 < l.1).map(|(t, _)| t.0).collect();
    verdict(
        8,
        "t-SNE beats best LSP cell on 10 blobs",
        ts > ls && dominated_at.is_empty(),
        &format!(
            "best t-SNE {tn} {ts:.4} vs best LSP {ln} {ls:.4}; t-SNE hit below LSP at k = {dominated_at:?}"
        ),
    );
}

#[test]
fn fewer_control_points_score_higher() {
    let (x, labels) = ten_blobs();
    let out = lsp_grid(&x, &labels, 11);
    let score = |cp: usize, nn: usize| {
        cell_score(&out, |p| {
            matches!(p, CellParams::Lsp { control_points, neighbors } if *control_points == cp && *neighbors == nn)
        })
    };
    let (a10, b10, a20, b20) = (score(25, 10), score(75, 10), score(25, 20), score(75, 20));
    verdict(
        9,
        "LSP silhouette CP=25 >= CP=75",
        a10 >= b10 && a20 >= b20,
        &format!("NN=10: {a10:.4} vs {b10:.4}; NN=20: {a20:.4} vs {b20:.4}"),
    );
}

#[test]
fn pca_to_forty_beats_twenty() {
    let (x, labels) = noisy_features(&NoisyFeatureSpec::standard(50, 13)).unwrap();
    let cfg = sweep_config("input = -\nmethod = tsne\nperplexity = 30\niterations = 1000\npca_dims = 40, 20\nseed = 13\nout = -\n");
    let out = run_sweep_on(&x, &labels, &cfg);
    let score = |d: usize| cell_score(&out, |p| matches!(p, CellParams::Tsne { pca_dims: Some(k), .. } if *k == d));
    let (s40, s20) = (score(40), score(20));
    verdict(
        10,
        "t-SNE after PCA-40 >= after PCA-20",
        s40 >= s20,
        &format!("PCA-40 {s40:.4}, PCA-20 {s20:.4}"),
    );
}

fn silhouette_reference(e: &Embedding) -> f64 {
    let n = e.len();
    let mut total = 0.0;
    for i in 0..n {
        let li = e.labels.code(i);
        let mut same = (0.0, 0usize);
        let mut other: Vec<(f64, usize)> = vec![(0.0, 0); e.labels.num_classes()];
        for j in 0..n {
            if j == i {
                continue;
            }
            let dij = euclid(e.point(i), e.point(j));
            if e.labels.code(j) == li {
                same.0 += dij;
                same.1 += 1;
            } else {
                other[e.labels.code(j)].0 += dij;
                other[e.labels.code(j)].1 += 1;
            }
        }
        if same.1 == 0 {
            continue;
        }
        let a = same.0 / same.1 as f64;
        let b = other
            .iter()
            .filter(|o| o.1 > 0)
            .map(|o| o.0 / o.1 as f64)
            .fold(f64::INFINITY, f64::min);
        if a.max(b) > 0.0 {
            total += (b - a) / a.max(b);
        }
    }
    total / n as f64
}

#[test]
fn silhouette_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(4..=200);
        let k = rng.random_range(2..=5.min(n));
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)]).collect();
        let mut codes: Vec<usize> = (0..n).map(|i| i % k).collect();
        codes.shuffle(&mut rng);
        let e = embedding_from(&rows, &codes);
        worst = worst.max((silhouette(&e).unwrap() - silhouette_reference(&e)).abs());
    }
    let four = silhouette(&embedding_from(&[vec![0.0], vec![1.0], vec![10.0], vec![11.0]], &[0, 0, 1, 1])).unwrap();
    verdict(
        11,
        "silhouette vs double-loop reference",
        worst <= 1e-12 && (four - 0.8997).abs() <= 1e-4,
        &format!("max deviation {worst:.2e}, 4-point value {four:.6}"),
    );
}

fn sweep_files(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let name = p.file_name().unwrap().to_string_lossy();
            name == "report.csv" || name.starts_with("embedding_")
        })
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (x, labels) = gaussian_blobs(&BlobSpec::standard(3, 40, 5, 21)).unwrap();
    let data = dir.path().join("blobs.csv");
    projlab::dataset::write_csv(&x, &labels, &data).unwrap();
    let configs = [
        "method = lsp\ncontrol_points = 10, 20\nneighbors = 5, 8\nseed = 3\n",
        "method = tsne\nperplexity = 10, 20\niterations = 300\npca_dims = 3\nseed = 3\n",
    ];
    let mut compared = 0;
    let mut identical = true;
    for (c, body) in configs.iter().enumerate() {
        let mut runs = Vec::new();
        for r in 0..2 {
            let out = dir.path().join(format!("c{c}_r{r}"));
            let path = dir.path().join(format!("c{c}_r{r}.cfg"));
            std::fs::write(
                &path,
                format!("input = {}\n{body}out = {}\n", data.display(), out.display()),
            )
            .unwrap();
            let cfg = SweepConfig::from_file(&path, &[]).unwrap();
            let outcome = projlab::sweep::run_sweep(&cfg).unwrap();
            assert!(outcome.cells.iter().all(|c| c.row.error.is_none()));
            write_outputs(&outcome, &out, false).unwrap();
            runs.push(sweep_files(&out));
        }
        compared += runs[0].len();
        identical &= runs[0].len() > 1 && runs[0] == runs[1];
    }
    // in-memory embedding text too, independent of the file writer
    let e = lsp::run(&x, &labels, &LspConfig { num_control_points: 10, ..LspConfig::default() }).unwrap();
    let e2 = lsp::run(&x, &labels, &LspConfig { num_control_points: 10, ..LspConfig::default() }).unwrap();
    identical &= render_embedding_csv(&e).unwrap() == render_embedding_csv(&e2).unwrap();
    verdict(
        12,
        "sweep reruns byte-identical",
        identical,
        &format!("{compared} files compared across 2 configs"),
    );
}

#[test]
fn corel_grids_reproduce_orderings() {
    let Ok(path) = std::env::var("PROJLAB_COREL_CSV") else {
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(b"[acceptance 13] COREL grids: SKIP (set PROJLAB_COREL_CSV to a labeled feature CSV)\n");
        return;
    };
    let label = std::env::var("PROJLAB_COREL_LABEL").unwrap_or_else(|_| "label".into());
    let (x, labels) = projlab::dataset::load_csv(&path, &label).unwrap();
    let lsp_out = lsp_grid(&x, &labels, 0);
    let tsne_cfg = sweep_config(
        "input = -\nmethod = tsne\nperplexity = 20, 30, 40\niterations = 1000, 1500\nseed = 0\nout = -\n",
    );
    let tsne_out = run_sweep_on(&x, &labels, &tsne_cfg);
    let scores = |o: &SweepOutcome| -> Vec<(String, f64)> {
        o.cells
            .iter()
            .map(|c| (c.params.name(), c.row.silhouette.unwrap_or(f64::NAN)))
            .collect()
    };
    let (ls, ts) = (scores(&lsp_out), scores(&tsne_out));
    let lsp_max = ls.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let tsne_min = ts.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let by = |cp: usize, nn: usize| cell_score(&lsp_out, |p| matches!(p, CellParams::Lsp { control_points, neighbors } if *control_points == cp && *neighbors == nn));
    let cp_trend = by(25, 10) >= by(75, 10) && by(25, 20) >= by(75, 20);
    verdict(
        13,
        "COREL grids reproduce orderings",
        tsne_min > lsp_max && cp_trend,
        &format!("LSP {ls:.4?}; t-SNE {ts:.4?}"),
    );
}
