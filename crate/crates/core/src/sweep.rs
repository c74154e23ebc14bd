//! Parameter sweeps: config parsing, grid execution and output files.
//!
//! A sweep config is a flat `key = value` text file. Lists are comma
//! separated, `#` starts a comment. Example:
//!
//! ```text
//! input = corel.csv
//! label_col = label
//! method = lsp
//! control_points = 25, 50, 75
//! neighbors = 10, 20
//! seed = 7
//! out = results/lsp
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::dataset::{load_csv, standardize_columns, DataMatrix, DistanceKind, LabelVector};
use crate::error::{Error, Result};
use crate::lsp::{self, LspConfig};
use crate::metrics::{neighborhood_hit_curve, silhouette, Embedding, DEFAULT_HIT_K_MAX};
use crate::report::{self, ReportRow};
use crate::tsne::{self, TsneConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Tsne,
    Lsp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Tsne => "tsne",
            Method::Lsp => "lsp",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tsne" | "t-sne" => Ok(Method::Tsne),
            "lsp" => Ok(Method::Lsp),
            other => Err(Error::Config(format!("unknown method `{other}` (expected tsne or lsp)"))),
        }
    }
}

const COMMON_KEYS: &[&str] = &[
    "input",
    "label_col",
    "method",
    "distance",
    "seed",
    "out",
    "standardize",
    "hit_k_max",
    "timings",
];
const LSP_KEYS: &[&str] = &["control_points", "neighbors"];
const TSNE_KEYS: &[&str] = &[
    "perplexity",
    "iterations",
    "pca_dims",
    "learning_rate",
    "momentum_initial",
    "momentum_final",
    "momentum_switch_iter",
    "exaggeration_factor",
    "exaggeration_iters",
    "init_scale",
];

/// Raw `key → value` pairs from a config file and/or flags.
pub type ConfigMap = BTreeMap<String, String>;

/// Parses `key = value` lines. Duplicate and unknown keys are errors.
pub fn parse_config_text(text: &str) -> Result<ConfigMap> {
    let mut map = ConfigMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = normalize_key(key);
        check_known(&key)?;
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(map)
}

fn normalize_key(key: &str) -> String {
    let key = key.trim().to_ascii_lowercase().replace('-', "_");
    match key.as_str() {
        "label_column" => "label_col".to_string(),
        "output" | "out_dir" => "out".to_string(),
        _ => key,
    }
}

fn check_known(key: &str) -> Result<()> {
    if COMMON_KEYS.contains(&key) || LSP_KEYS.contains(&key) || TSNE_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::Config(format!("unknown key `{key}`")))
    }
}

/// Inserts or replaces entries; later values win.
pub fn apply_overrides(map: &mut ConfigMap, overrides: &[(String, String)]) -> Result<()> {
    for (k, v) in overrides {
        let key = normalize_key(k);
        check_known(&key)?;
        map.insert(key, v.clone());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub input: PathBuf,
    pub label_column: String,
    pub method: Method,
    pub control_points: Vec<usize>,
    pub neighbors: Vec<usize>,
    pub perplexity: Vec<f64>,
    pub iterations: Vec<usize>,
    /// `None` runs t-SNE on the raw features.
    pub pca_dims: Vec<Option<usize>>,
    pub distance: DistanceKind,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub standardize: bool,
    pub hit_k_max: usize,
    /// Write wall-clock seconds into `report.csv` (makes the file nondeterministic).
    pub timings: bool,
    /// Optimizer settings shared by every t-SNE cell; perplexity, iterations
    /// and seed are overwritten per cell.
    pub tsne: TsneConfig,
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_scalar(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("grid `{key}` is empty")));
    }
    Ok(items)
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

impl SweepConfig {
    pub fn from_file(path: impl AsRef<Path>, overrides: &[(String, String)]) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut map = parse_config_text(&text)?;
        apply_overrides(&mut map, overrides)?;
        Self::from_map(&map)
    }

    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        for key in map.keys() {
            check_known(key)?;
        }
        let required = |key: &str| {
            map.get(key)
                .map(String::as_str)
                .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
        };
        let method: Method = required("method")?.parse()?;
        let foreign = match method {
            Method::Lsp => TSNE_KEYS,
            Method::Tsne => LSP_KEYS,
        };
        if let Some(key) = foreign.iter().find(|k| map.contains_key(**k)) {
            return Err(Error::Config(format!("key `{key}` does not apply to method {}", method.name())));
        }

        let mut cfg = SweepConfig {
            input: PathBuf::from(required("input")?),
            label_column: map.get("label_col").cloned().unwrap_or_else(|| "label".to_string()),
            method,
            control_points: Vec::new(),
            neighbors: Vec::new(),
            perplexity: Vec::new(),
            iterations: Vec::new(),
            pca_dims: vec![None],
            distance: map.get("distance").map_or(Ok(DistanceKind::Euclidean), |v| v.parse())?,
            seed: map.get("seed").map_or(Ok(0), |v| parse_scalar("seed", v))?,
            out_dir: PathBuf::from(required("out")?),
            standardize: map.get("standardize").map_or(Ok(false), |v| parse_bool("standardize", v))?,
            hit_k_max: map.get("hit_k_max").map_or(Ok(DEFAULT_HIT_K_MAX), |v| parse_scalar("hit_k_max", v))?,
            timings: map.get("timings").map_or(Ok(false), |v| parse_bool("timings", v))?,
            tsne: TsneConfig::default(),
        };
        match method {
            Method::Lsp => {
                cfg.control_points = parse_list("control_points", required("control_points")?)?;
                cfg.neighbors = parse_list("neighbors", required("neighbors")?)?;
            }
            Method::Tsne => {
                cfg.perplexity = parse_list("perplexity", required("perplexity")?)?;
                cfg.iterations = parse_list("iterations", required("iterations")?)?;
                if let Some(v) = map.get("pca_dims") {
                    cfg.pca_dims = parse_list::<usize>("pca_dims", v)?.into_iter().map(Some).collect();
                }
                let t = &mut cfg.tsne;
                macro_rules! opt {
                    ($field:ident) => {
                        if let Some(v) = map.get(stringify!($field)) {
                            t.$field = parse_scalar(stringify!($field), v)?;
                        }
                    };
                }
                opt!(learning_rate);
                opt!(momentum_initial);
                opt!(momentum_final);
                opt!(momentum_switch_iter);
                opt!(exaggeration_factor);
                opt!(exaggeration_iters);
                opt!(init_scale);
                t.distance = cfg.distance;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every grid value that does not depend on the dataset size.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.hit_k_max == 0 {
            return bad("hit_k_max must be >= 1".into());
        }
        match self.method {
            Method::Lsp => {
                if self.control_points.is_empty() || self.neighbors.is_empty() {
                    return bad("lsp grids must be non-empty".into());
                }
                if let Some(cp) = self.control_points.iter().find(|&&c| c < 3) {
                    return bad(format!("control_points value {cp} must be >= 3"));
                }
                if self.neighbors.contains(&0) {
                    return bad("neighbors value 0 must be >= 1".into());
                }
            }
            Method::Tsne => {
                if self.perplexity.is_empty() || self.iterations.is_empty() || self.pca_dims.is_empty() {
                    return bad("tsne grids must be non-empty".into());
                }
                if let Some(p) = self.perplexity.iter().find(|&&p| !(p > 1.0)) {
                    return bad(format!("perplexity value {p} must exceed 1"));
                }
                if let Some(it) = self.iterations.iter().find(|&&it| it == 0 || it < self.tsne.exaggeration_iters) {
                    return bad(format!(
                        "iterations value {it} must be >= 1 and >= exaggeration_iters ({})",
                        self.tsne.exaggeration_iters
                    ));
                }
                if self.pca_dims.contains(&Some(0)) {
                    return bad("pca_dims value 0 must be >= 1".into());
                }
                // large n keeps every n-dependent check out of the way
                let probe = TsneConfig {
                    perplexity: 2.0,
                    iterations: self.iterations[0],
                    ..self.tsne.clone()
                };
                probe.validate(usize::MAX).map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Grid cells in declared order. LSP: control points outer, neighbors
    /// inner. t-SNE: PCA dims outer, then iterations, then perplexity.
    pub fn cells(&self) -> Vec<CellParams> {
        match self.method {
            Method::Lsp => self
                .control_points
                .iter()
                .flat_map(|&cp| self.neighbors.iter().map(move |&nn| CellParams::Lsp { control_points: cp, neighbors: nn }))
                .collect(),
            Method::Tsne => self
                .pca_dims
                .iter()
                .flat_map(|&pca| {
                    self.iterations.iter().flat_map(move |&it| {
                        self.perplexity.iter().map(move |&p| CellParams::Tsne {
                            perplexity: p,
                            iterations: it,
                            pca_dims: pca,
                        })
                    })
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellParams {
    Lsp {
        control_points: usize,
        neighbors: usize,
    },
    Tsne {
        perplexity: f64,
        iterations: usize,
        pca_dims: Option<usize>,
    },
}

impl CellParams {
    pub fn method(&self) -> Method {
        match self {
            CellParams::Lsp { .. } => Method::Lsp,
            CellParams::Tsne { .. } => Method::Tsne,
        }
    }

    /// File-name stem, e.g. `lsp_cp25_nn10` or `tsne_perp30_it1500_pca40`.
    pub fn name(&self) -> String {
        match *self {
            CellParams::Lsp {
                control_points,
                neighbors,
            } => format!("lsp_cp{control_points}_nn{neighbors}"),
            CellParams::Tsne {
                perplexity,
                iterations,
                pca_dims,
            } => {
                let mut s = format!("tsne_perp{perplexity}_it{iterations}");
                if let Some(p) = pca_dims {
                    s.push_str(&format!("_pca{p}"));
                }
                s
            }
        }
    }

    pub fn columns(&self) -> Vec<(String, String)> {
        match *self {
            CellParams::Lsp {
                control_points,
                neighbors,
            } => vec![
                ("control_points".into(), control_points.to_string()),
                ("neighbors".into(), neighbors.to_string()),
            ],
            CellParams::Tsne {
                perplexity,
                iterations,
                pca_dims,
            } => vec![
                ("perplexity".into(), perplexity.to_string()),
                ("iterations".into(), iterations.to_string()),
                ("pca_dims".into(), pca_dims.map(|p| p.to_string()).unwrap_or_default()),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub params: CellParams,
    pub row: ReportRow,
    pub embedding: Option<Embedding>,
    pub hit_curve: Option<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub cells: Vec<CellResult>,
}

impl SweepOutcome {
    pub fn rows(&self) -> Vec<ReportRow> {
        self.cells.iter().map(|c| c.row.clone()).collect()
    }
}

/// Loads the dataset named in `config` and runs every cell.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    let (x, labels) = load_csv(&config.input, &config.label_column)?;
    let x = if config.standardize { standardize_columns(&x) } else { x };
    Ok(run_sweep_on(&x, &labels, config))
}

/// Runs every cell on an in-memory dataset. Cells run in parallel; results
/// come back in grid order. A failing cell yields a row with an error and
/// no score.
pub fn run_sweep_on(x: &DataMatrix, labels: &LabelVector, config: &SweepConfig) -> SweepOutcome {
    let cells = config
        .cells()
        .into_par_iter()
        .map(|params| run_cell(x, labels, config, params))
        .collect();
    SweepOutcome { cells }
}

fn run_cell(x: &DataMatrix, labels: &LabelVector, config: &SweepConfig, params: CellParams) -> CellResult {
    let start = Instant::now();
    let outcome = project(x, labels, config, params).and_then(|emb| {
        let s = silhouette(&emb)?;
        let k_max = config.hit_k_max.min(emb.len().saturating_sub(1));
        let curve = neighborhood_hit_curve(&emb, k_max)?;
        Ok((emb, s, curve))
    });
    let seconds = start.elapsed().as_secs_f64();
    let mut row = ReportRow {
        method: params.method().name().to_string(),
        params: params.columns(),
        silhouette: None,
        seconds,
        seed: config.seed,
        error: None,
    };
    match outcome {
        Ok((emb, s, curve)) => {
            row.silhouette = Some(s);
            CellResult {
                params,
                row,
                embedding: Some(emb),
                hit_curve: Some(curve),
            }
        }
        Err(e) => {
            row.error = Some(e.to_string());
            CellResult {
                params,
                row,
                embedding: None,
                hit_curve: None,
            }
        }
    }
}

fn project(x: &DataMatrix, labels: &LabelVector, config: &SweepConfig, params: CellParams) -> Result<Embedding> {
    match params {
        CellParams::Lsp {
            control_points,
            neighbors,
        } => {
            let cfg = LspConfig {
                num_control_points: control_points,
                num_neighbors: neighbors,
                distance: config.distance,
                out_dim: 2,
                seed: config.seed,
            };
            lsp::run(x, labels, &cfg)
        }
        CellParams::Tsne {
            perplexity,
            iterations,
            pca_dims,
        } => {
            let cfg = TsneConfig {
                perplexity,
                iterations,
                seed: config.seed,
                distance: config.distance,
                ..config.tsne.clone()
            };
            tsne::run(x, labels, &cfg, pca_dims)
        }
    }
}

/// Writes `report.csv`, `embedding_<cell>.csv`, `scatter_<cell>.svg` and
/// `hitcurve.csv` into `out_dir`. Returns the written paths.
pub fn write_outputs(outcome: &SweepOutcome, out_dir: impl AsRef<Path>, include_seconds: bool) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let report_path = out_dir.join("report.csv");
    report::write_report_csv(&outcome.rows(), &report_path, include_seconds)?;
    written.push(report_path);

    let mut curves = Vec::new();
    for cell in &outcome.cells {
        let name = cell.params.name();
        if let Some(emb) = &cell.embedding {
            let path = out_dir.join(format!("embedding_{name}.csv"));
            report::write_embedding_csv(emb, &path)?;
            written.push(path);
            if emb.dim() == 2 {
                let path = out_dir.join(format!("scatter_{name}.svg"));
                report::write_svg_scatter(emb, &path)?;
                written.push(path);
            }
        }
        if let Some(curve) = &cell.hit_curve {
            curves.push((name, curve.clone()));
        }
    }
    if !curves.is_empty() {
        let path = out_dir.join("hitcurve.csv");
        report::write_hit_curves_csv(&curves, &path)?;
        written.push(path);
    }
    Ok(written)
}
