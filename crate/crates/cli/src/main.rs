//! `project`: run t-SNE and LSP parameter sweeps over labeled CSV data.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use projlab::dataset::write_csv;
use projlab::sweep::{self, ConfigMap, SweepConfig};
use projlab::synth::{gaussian_blobs, BlobSpec};

#[derive(Parser)]
#[command(name = "project", version, about = "Multidimensional projection sweeps (t-SNE, LSP)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the grid described by a config file; flags override file values.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        flags: SweepFlags,
    },
    /// Run a grid given entirely by flags.
    Run {
        #[command(flatten)]
        flags: SweepFlags,
    },
    /// Write a synthetic Gaussian-blob dataset as CSV.
    Blobs {
        #[arg(long, default_value_t = 3)]
        blobs: usize,
        #[arg(long, default_value_t = 100)]
        per_blob: usize,
        #[arg(long, default_value_t = 10)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 10.0)]
        separation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Config keys settable from the command line. Grid flags take a single
/// value or a comma-separated list.
#[derive(Args, Default)]
struct SweepFlags {
    #[arg(long, value_parser = ["tsne", "lsp"])]
    method: Option<String>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    label_col: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// euclidean or cosine
    #[arg(long)]
    distance: Option<String>,
    #[arg(long)]
    control_points: Option<String>,
    #[arg(long)]
    neighbors: Option<String>,
    #[arg(long)]
    perplexity: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    pca_dims: Option<String>,
    #[arg(long)]
    hit_k_max: Option<String>,
    /// Standardize each feature column before projecting.
    #[arg(long)]
    standardize: bool,
    /// Fill the seconds column of report.csv.
    #[arg(long)]
    timings: bool,
    /// Any other config key, e.g. `--set learning_rate=100`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl SweepFlags {
    fn overrides(&self) -> Result<Vec<(String, String)>> {
        let named = [
            ("method", &self.method),
            ("input", &self.input),
            ("label_col", &self.label_col),
            ("out", &self.out),
            ("seed", &self.seed),
            ("distance", &self.distance),
            ("control_points", &self.control_points),
            ("neighbors", &self.neighbors),
            ("perplexity", &self.perplexity),
            ("iterations", &self.iterations),
            ("pca_dims", &self.pca_dims),
            ("hit_k_max", &self.hit_k_max),
        ];
        let mut out: Vec<(String, String)> = Vec::new();
        for item in &self.set {
            let (k, v) = item
                .split_once('=')
                .with_context(|| format!("--set expects KEY=VALUE, got `{item}`"))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        out.extend(named.iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))));
        if self.standardize {
            out.push(("standardize".into(), "true".into()));
        }
        if self.timings {
            out.push(("timings".into(), "true".into()));
        }
        Ok(out)
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("PROJLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("PROJLAB_THREADS must be a non-negative integer, got `{raw}`"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring thread pool")?;
    }
    Ok(())
}

fn run_config(config: &SweepConfig) -> Result<bool> {
    let cells = config.cells().len();
    eprintln!(
        "{} sweep: {cells} cell(s) on {} -> {}",
        config.method.name(),
        config.input.display(),
        config.out_dir.display()
    );
    let outcome = sweep::run_sweep(config)?;
    let written = sweep::write_outputs(&outcome, &config.out_dir, config.timings)?;

    let mut ok = true;
    for cell in &outcome.cells {
        let row = &cell.row;
        match (&row.silhouette, &row.error) {
            (Some(s), _) => println!("{:<32} silhouette {s:>7.4}  {:>8.3}s", cell.params.name(), row.seconds),
            (None, err) => {
                ok = false;
                println!(
                    "{:<32} FAILED: {}",
                    cell.params.name(),
                    err.as_deref().unwrap_or("unknown error")
                );
            }
        }
    }
    eprintln!("wrote {} file(s) to {}", written.len(), config.out_dir.display());
    Ok(ok)
}

fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    configure_threads()?;
    match cli.command {
        Command::Sweep { config, flags } => {
            let cfg = SweepConfig::from_file(&config, &flags.overrides()?)
                .with_context(|| format!("loading {}", config.display()))?;
            run_config(&cfg)
        }
        Command::Run { flags } => {
            let mut map = ConfigMap::new();
            sweep::apply_overrides(&mut map, &flags.overrides()?)?;
            for key in ["method", "input", "out"] {
                if !map.contains_key(key) {
                    bail!("--{key} is required");
                }
            }
            let cfg = SweepConfig::from_map(&map)?;
            run_config(&cfg)
        }
        Command::Blobs {
            blobs,
            per_blob,
            dim,
            sigma,
            separation,
            seed,
            out,
        } => {
            let spec = BlobSpec {
                blobs,
                per_blob,
                dim,
                sigma,
                separation,
                seed,
            };
            let (x, labels) = gaussian_blobs(&spec)?;
            write_csv(&x, &labels, &out)?;
            eprintln!("wrote {} rows to {}", x.nrows(), out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
