//! Command-line front end: synthesize data, inject missingness, impute a
//! single table, run the benchmark grid, or sweep hidden-layer splits.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ffeam::bench::{
    aggregate, render_aggregate, render_sweep, run_benchmark, sweep_split, write_report,
    DatasetSource, DatasetSpec, Method, RunConfig, SweepConfig,
};
use ffeam::dataset::{
    generate_synthetic, inject_missing, load_csv, save_csv, save_mask_csv, InjectionSpec,
    SyntheticSpec,
};
use ffeam::{Error, Result};

#[derive(Parser)]
#[command(name = "ffeam", version, about = "Missing-value imputation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic table with structured and noise columns.
    Gen(GenArgs),
    /// Mask cells of a complete CSV, keeping the ground truth.
    Inject(InjectArgs),
    /// Fill the missing cells of a CSV with one method.
    Impute(ImputeArgs),
    /// Run the full dataset x rate x seed x method benchmark grid.
    Bench(BenchArgs),
    /// Sweep (m1, m2) splits of a fixed hidden-neuron budget.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of rows.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Number of structured (correlated) columns.
    #[arg(long, default_value_t = 3)]
    valid: usize,
    /// Number of independent noise columns.
    #[arg(long, default_value_t = 0)]
    noise: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InjectArgs {
    /// Complete input CSV.
    #[arg(long)]
    input: PathBuf,
    /// Fraction of cells to mask, in [0, 1).
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Masked CSV output path.
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth CSV output path (row, col, value per masked cell).
    #[arg(long)]
    truth: Option<PathBuf>,
    /// 0/1 mask CSV output path.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Cell text standing for a missing value.
    #[arg(long, default_value = "")]
    missing_token: String,
}

#[derive(Args)]
struct ImputeArgs {
    /// Input CSV with missing cells.
    #[arg(long)]
    input: PathBuf,
    /// means | knn | ae | ce_aann | ffeam
    #[arg(long)]
    method: String,
    /// Key-value config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override every configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Filled CSV output path.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON-lines training-log output (neural methods only).
    #[arg(long)]
    log: Option<PathBuf>,
    /// Cell text standing for a missing value.
    #[arg(long, default_value = "")]
    missing_token: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Key-value config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report output directory (report.csv, report.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override every configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Key-value config file supplying shared hyperparameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset name (bundled name, or one configured in the config file).
    #[arg(long, default_value = "iris")]
    dataset: String,
    #[arg(long, default_value_t = 0.2)]
    rate: f64,
    /// Hidden-neuron budget each split must sum to.
    #[arg(long, default_value_t = 20)]
    total_hidden: usize,
    /// Comma-separated m1:m2 pairs, e.g. "5:15,10:10,15:5". Defaults to
    /// every split with both sides >= 5.
    #[arg(long)]
    splits: Option<String>,
    /// Override every configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Optional CSV output for the per-split medians.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(a) => {
            let table = generate_synthetic(&SyntheticSpec::new(a.samples, a.valid, a.noise, a.seed)?)?;
            save_csv(&table, &a.out, "")?;
            println!("wrote {} rows x {} columns to {}", table.n_rows(), table.n_cols(), a.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Inject(a) => {
            let table = load_csv(&a.input, &a.missing_token)?;
            let (masked, truth) = inject_missing(&table, &InjectionSpec::new(a.rate, a.seed)?)?;
            save_csv(&masked, &a.out, &a.missing_token)?;
            if let Some(path) = &a.truth {
                let mut text = String::from("row,col,value\n");
                for c in &truth {
                    text.push_str(&format!("{},{},{}\n", c.row, c.col, c.value));
                }
                std::fs::write(path, text).map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
            }
            if let Some(path) = &a.mask {
                save_mask_csv(&masked, path)?;
            }
            println!("masked {} of {} cells", truth.len(), table.n_rows() * table.n_cols());
            Ok(ExitCode::SUCCESS)
        }
        Command::Impute(a) => {
            let mut cfg = load_config(a.config.as_deref())?;
            if let Some(seed) = a.seed {
                cfg.override_seed(seed);
            }
            let method = Method::parse(&a.method)?;
            let table = load_csv(&a.input, &a.missing_token)?;
            let seed = cfg.seeds.first().copied().unwrap_or(cfg.ffeam.seed);
            if let Some(log_path) = &a.log {
                let log = impute_logged(method, &table, &cfg, seed)?;
                if let Some(log) = log {
                    let mut f = std::fs::File::create(log_path).map_err(|source| Error::Io {
                        path: log_path.display().to_string(),
                        source,
                    })?;
                    log.write_jsonl(&mut f).map_err(|source| Error::Io {
                        path: log_path.display().to_string(),
                        source,
                    })?;
                }
            }
            let filled = ffeam::bench::impute_with(method, &table, &cfg, seed)?.into_observed()?;
            save_csv(&filled, &a.out, &a.missing_token)?;
            println!("filled {} cells with {}", table.n_missing(), method.as_str());
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(a) => {
            let mut cfg = load_config(a.config.as_deref())?;
            if let Some(seed) = a.seed {
                cfg.override_seed(seed);
            }
            let report = run_benchmark(&cfg)?;
            print!("{}", render_aggregate(&aggregate(&report)));
            let out_dir = a
                .out
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("."));
            write_report(&report, &cfg, &out_dir)?;
            println!("report written to {}", out_dir.display());
            let failed = report.n_failed();
            if failed > 0 {
                eprintln!("{failed} record(s) failed");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(a) => {
            let mut base = load_config(a.config.as_deref())?;
            if let Some(seed) = a.seed {
                base.override_seed(seed);
            }
            let dataset = base
                .datasets
                .iter()
                .find(|d| d.name == a.dataset)
                .cloned()
                .unwrap_or(DatasetSpec {
                    name: a.dataset.clone(),
                    source: DatasetSource::Builtin,
                });
            let mut cfg = SweepConfig::new(dataset, a.rate, base);
            cfg.total_hidden = a.total_hidden;
            if let Some(text) = &a.splits {
                cfg.splits = parse_splits(text)?;
            } else if a.total_hidden != 20 {
                return Err(Error::Config(
                    "custom --total-hidden needs explicit --splits".into(),
                ));
            }
            let records = sweep_split(&cfg)?;
            print!("{}", render_sweep(&records));
            if let Some(path) = &a.out {
                let mut text = String::from("m1,m2,median_rmse,median_mae,n_seeds\n");
                for r in &records {
                    text.push_str(&format!(
                        "{},{},{},{},{}\n",
                        r.m1, r.m2, r.median_rmse, r.median_mae, r.n_seeds
                    ));
                }
                std::fs::write(path, text).map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_config(path: Option<&std::path::Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn parse_splits(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|pair| {
            let (a, b) = pair.split_once(':').ok_or_else(|| {
                Error::Config(format!("split '{pair}' is not of the form m1:m2"))
            })?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("split '{pair}' holds a non-integer")))
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

/// Run a neural method once, returning its training log (None for the
/// non-iterative methods).
fn impute_logged(
    method: Method,
    table: &ffeam::dataset::NumericTable,
    cfg: &RunConfig,
    seed: u64,
) -> Result<Option<ffeam::model::TrainLog>> {
    use ffeam::baselines::{impute_ce_aann, impute_classic_ae};
    let mut prefill_cfg = cfg.prefill;
    prefill_cfg.forest.seed = seed;
    Ok(match method {
        Method::Ffeam => {
            let mut c = cfg.ffeam;
            c.seed = seed;
            Some(ffeam::model::train(table, &c, &prefill_cfg, &cfg.rbf)?.1)
        }
        Method::Ae => {
            let mut c = cfg.ae;
            c.train.seed = seed;
            Some(impute_classic_ae(table, &c, &prefill_cfg)?.1)
        }
        Method::CeAann => {
            let mut c = cfg.ce_aann;
            c.train.seed = seed;
            Some(impute_ce_aann(table, &c, &prefill_cfg)?.1)
        }
        Method::Means | Method::Knn => None,
    })
}
