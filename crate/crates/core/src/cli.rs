//! Command-line front end.
//!
//! Every subcommand accepts `--config <file>`: a flat `key = value` file whose
//! keys are long flag names. Flags given on the command line win over the
//! file. `SPCA_WORKERS` sets the worker count when `--workers` is absent and
//! takes precedence over a `workers` entry in the file.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 solver error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;

use crate::bench::dataset::{convert_sources, save_labeled_csv, ConvertSource, SourceFormat};
use crate::bench::report::{emit_report, join_counts, Field, Table};
use crate::bench::{
    effective_gamma, load_dataset, load_matrix_csv, parse_split_policy, run_recognition_experiment,
    run_timing_experiment, sparse_factor_dataset, BlockStart, DatasetFormat, ExperimentConfig, GammaScale,
    Method, SparseFactorSpec, TimingConfig,
};
use crate::config::{Init, SolverConfig, Variant};
use crate::error::{Result, SpcaError};
use crate::matrix::center_columns_with_mean;
use crate::parallel::{KernelPlan, DEFAULT_CHUNK};
use crate::pca::pca_fit;

pub const WORKERS_ENV: &str = "SPCA_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "spca",
    version,
    about = "Sparse PCA with the generalized power method"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit one SPCA or PCA model and write its loadings.
    Solve(SolveArgs),
    /// Time all solver variants on random Gaussian instances.
    BenchTiming(TimingArgs),
    /// Compare embeddings by nearest-neighbor recognition accuracy.
    BenchRecognition(RecognitionArgs),
    /// Dataset helpers.
    Datasets {
        #[command(subcommand)]
        action: DatasetsCommand,
    },
}

#[derive(Debug, Subcommand)]
enum DatasetsCommand {
    /// Convert libsvm or label-last files into the labeled CSV layout.
    Convert(ConvertArgs),
    /// Write the seeded synthetic sparse-factor dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat key = value file with defaults for any flag.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    chunk: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Samples as rows, numeric CSV with an optional header.
    #[arg(long)]
    input: PathBuf,
    /// Input uses the labeled layout; labels are ignored.
    #[arg(long)]
    labeled: bool,
    /// Do not center the feature columns before solving.
    #[arg(long)]
    no_center: bool,
    #[arg(long, default_value = "sl1")]
    variant: Method,
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// One value or one per component.
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    gamma: Vec<f64>,
    #[arg(long, default_value = "absolute")]
    gamma_scale: GammaScale,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    mu: Vec<f64>,
    #[arg(long, default_value_t = SolverConfig::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = SolverConfig::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// max-norm-column (default), random or multi-start (single-unit only).
    #[arg(long)]
    init: Option<String>,
    /// Random starts added to the column starts of multi-start.
    #[arg(long, default_value_t = 32)]
    starts: usize,
    #[arg(long, env = WORKERS_ENV, default_value_t = 1)]
    workers: usize,
    /// Loadings CSV; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Objective trace CSV (component, iteration, objective).
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct TimingArgs {
    /// Values of N; P = N / 10.
    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.05")]
    gamma: Vec<f64>,
    #[arg(long, default_value = "relative")]
    gamma_scale: GammaScale,
    #[arg(long, default_value_t = 5)]
    m: usize,
    #[arg(long, value_delimiter = ',', default_value = "sl1,sl0,bl1,bl0")]
    variant: Vec<Variant>,
    #[arg(long, default_value_t = SolverConfig::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = SolverConfig::DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long, default_value = "max-norm-column")]
    block_init: BlockStart,
    /// Worker counts to sweep.
    #[arg(long, env = WORKERS_ENV, value_delimiter = ',', default_value = "1")]
    workers: Vec<usize>,
    /// Skip sizes whose matrix would need more bytes than this.
    #[arg(long, default_value_t = 4 << 30)]
    max_bytes: usize,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct RecognitionArgs {
    /// Labeled CSV dataset.
    #[arg(long)]
    dataset: PathBuf,
    /// file, first:K, per-class:K or grouped:TRAIN/TEST (comma-separated groups).
    #[arg(long, default_value = "file")]
    split: String,
    #[arg(long, value_delimiter = ',', default_value = "pca,sl1,sl0,bl1,bl0")]
    variant: Vec<Method>,
    /// Subspace dimensions to sweep.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    gamma: Vec<f64>,
    #[arg(long, default_value = "absolute")]
    gamma_scale: GammaScale,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    mu: Vec<f64>,
    #[arg(long, default_value_t = SolverConfig::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = SolverConfig::DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[arg(long, default_value_t = 1)]
    neighbors: usize,
    #[arg(long, default_value = "max-norm-column")]
    block_init: BlockStart,
    #[arg(long, env = WORKERS_ENV, default_value_t = 1)]
    workers: usize,
    /// Accuracy CSV; fit times go to `<stem>.timings.csv` beside it.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[arg(long)]
    from: SourceFormat,
    /// Source files, in order.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Group id for each input file.
    #[arg(long, value_delimiter = ',')]
    group: Vec<u32>,
    /// train or test for each input file.
    #[arg(long, value_delimiter = ',')]
    split_tag: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 20)]
    classes: usize,
    #[arg(long, default_value_t = 30)]
    per_class: usize,
    #[arg(long, default_value_t = 200)]
    features: usize,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

/// Reads `key = value` lines; `#` starts a comment. Keys may use `_` or `-`.
pub fn parse_config_file(text: &str, origin: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| SpcaError::Parse {
            path: origin.to_path_buf(),
            line: idx + 1,
            message: format!("expected key = value, got `{line}`"),
        })?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(SpcaError::Parse {
                path: origin.to_path_buf(),
                line: idx + 1,
                message: format!("invalid key `{key}`"),
            });
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn flag_given(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    args.iter()
        .any(|a| a == &flag || a.starts_with(&format!("{flag}=")))
}

/// Splices config-file entries into `args` as flags, after the subcommand
/// names and before the user's flags. Entries for flags already present are
/// skipped.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args
            .get(pos + 1)
            .cloned()
            .ok_or_else(|| SpcaError::InvalidConfig("--config needs a file".into()))?,
    };
    let text = fs::read_to_string(&path).map_err(|e| SpcaError::io(&path, e))?;
    // A malformed config file is a usage error, not a data error.
    let entries =
        parse_config_file(&text, Path::new(&path)).map_err(|e| SpcaError::InvalidConfig(e.to_string()))?;
    let env_workers = std::env::var_os(WORKERS_ENV).is_some();
    let leaf = if args.get(1).map(String::as_str) == Some("datasets") {
        3
    } else {
        2
    };
    let leaf = leaf.min(args.len());
    let mut injected = Vec::new();
    for (key, value) in entries {
        if flag_given(&args, &key) || (key == "workers" && env_workers) {
            continue;
        }
        match value.as_str() {
            "true" => injected.push(format!("--{key}")),
            "false" => {}
            _ => {
                injected.push(format!("--{key}"));
                injected.push(value);
            }
        }
    }
    let mut out = args[..leaf].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[leaf..]);
    Ok(out)
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Solve(args) => solve(args),
        Command::BenchTiming(args) => timing(args),
        Command::BenchRecognition(args) => recognition(args),
        Command::Datasets {
            action: DatasetsCommand::Convert(args),
        } => convert(args),
        Command::Datasets {
            action: DatasetsCommand::Synth(args),
        } => synth(args),
    }
}

fn parse_init(name: &str, starts: usize, seed: u64) -> Result<Init> {
    match name {
        "max-norm-column" => Ok(Init::MaxNormColumn),
        "random" => Ok(Init::RandomOrthonormal { seed }),
        "multi-start" => Ok(Init::MultiStart {
            random_starts: starts,
            seed,
        }),
        other => Err(SpcaError::InvalidConfig(format!("unknown init `{other}`"))),
    }
}

fn loadings_table(values: &DMatrix<f64>) -> Table {
    let mut header = vec!["feature".to_string()];
    header.extend((1..=values.ncols()).map(|j| format!("z{j}")));
    let mut table = Table::new(header);
    for i in 0..values.nrows() {
        let mut row: Vec<Field> = vec![i.into()];
        row.extend(values.row(i).iter().map(|&v| Field::Float(v)));
        table.push(row);
    }
    table
}

fn write_table(table: &Table, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => emit_report(table, path),
        None => {
            let text = table.to_csv_string()?;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| SpcaError::io("<stdout>", e))
        }
    }
}

fn solve(args: SolveArgs) -> Result<()> {
    let samples = if args.labeled {
        crate::bench::dataset::LabeledDataset::train_matrix(&load_dataset(
            &args.input,
            DatasetFormat::CsvLabeled,
        )?)?
    } else {
        load_matrix_csv(&args.input)?
    };
    let plan = KernelPlan::new(args.workers, args.common.chunk)?;
    let variant = match args.variant {
        Method::Pca => {
            let model = pca_fit(&samples, args.m)?;
            write_table(&loadings_table(&model.components), args.out.as_deref())?;
            let ev = model.explained_variance();
            eprintln!(
                "pca m {}: explained variance {}",
                args.m,
                ev.iter()
                    .map(|v| format!("{v:.6e}"))
                    .collect::<Vec<_>>()
                    .join(";")
            );
            return Ok(());
        }
        Method::Spca(v) => v,
    };
    let a = if args.no_center {
        samples
    } else {
        center_columns_with_mean(&samples).0
    };
    let gamma = effective_gamma(
        &a,
        variant.penalty(),
        args.m,
        &args.gamma,
        &args.mu,
        args.gamma_scale,
    )?;
    let mut config = SolverConfig::for_variant(variant, args.m, 0.0)
        .with_gamma(gamma)
        .with_mu(args.mu.clone())
        .with_tol(args.tol)
        .with_max_iter(args.max_iter)
        .with_plan(plan);
    config = match args.init.as_deref() {
        Some(name) => config.with_init(parse_init(name, args.starts, args.common.seed)?),
        None => config.with_init(Init::MaxNormColumn),
    };
    let (mut z, report) = crate::solve(&a, &config)?;
    z.canonicalize_signs();
    write_table(&loadings_table(z.values()), args.out.as_deref())?;
    if let Some(path) = &args.trace {
        let mut trace = Table::new(["component", "iteration", "objective"]);
        for (j, history) in report.component_histories.iter().enumerate() {
            for (k, f) in history.iter().enumerate() {
                trace.push(vec![j.into(), k.into(), Field::Float(*f)]);
            }
        }
        emit_report(&trace, path)?;
    }
    eprintln!(
        "{variant} m {}: objective {:.6e}, iterations {}, converged {}, nnz {}",
        args.m,
        report.final_objective(),
        report.iterations,
        report.converged,
        join_counts(&report.nnz_per_component).render()
    );
    Ok(())
}

fn timing(args: TimingArgs) -> Result<()> {
    let config = TimingConfig {
        sizes: args.sizes,
        instances: args.instances,
        gammas: args.gamma,
        gamma_scale: args.gamma_scale,
        m: args.m,
        variants: args.variant,
        workers: args.workers,
        chunk: args.common.chunk,
        seed: args.common.seed,
        tol: args.tol,
        max_iter: args.max_iter,
        block_init: args.block_init,
        max_bytes: args.max_bytes,
    };
    let outcome = run_timing_experiment(&config)?;
    emit_report(&outcome.table, &args.out)?;
    let failed = outcome.records.iter().filter(|r| r.status != "ok").count();
    eprintln!(
        "{} solves timed, {failed} skipped or failed; wrote {}",
        outcome.records.len(),
        args.out.display()
    );
    Ok(())
}

fn recognition(args: RecognitionArgs) -> Result<()> {
    let dataset = load_dataset(&args.dataset, DatasetFormat::CsvLabeled)?;
    let config = ExperimentConfig {
        methods: args.variant,
        m_values: args.m,
        gamma: args.gamma,
        gamma_scale: args.gamma_scale,
        mu: args.mu,
        tol: args.tol,
        max_iter: args.max_iter,
        split: parse_split_policy(&args.split)?,
        repetitions: args.repetitions,
        seed: args.common.seed,
        neighbors: args.neighbors,
        block_init: args.block_init,
        plan: KernelPlan::new(args.workers, args.common.chunk)?,
    };
    let outcome = run_recognition_experiment(&dataset, &config)?;
    let sidecar = outcome.write(&args.out)?;
    for &method in &config.methods {
        for &m in &config.m_values {
            match outcome.mean_accuracy(method, m) {
                Some(acc) => eprintln!("{method} m {m}: mean accuracy {acc:.4}"),
                None => eprintln!("{method} m {m}: every repetition failed"),
            }
        }
    }
    eprintln!("wrote {} and {}", args.out.display(), sidecar.display());
    Ok(())
}

fn convert(args: ConvertArgs) -> Result<()> {
    let n = args.input.len();
    if !args.group.is_empty() && args.group.len() != n {
        return Err(SpcaError::InvalidConfig(format!(
            "{n} inputs but {} groups",
            args.group.len()
        )));
    }
    if !args.split_tag.is_empty() && args.split_tag.len() != n {
        return Err(SpcaError::InvalidConfig(format!(
            "{n} inputs but {} split tags",
            args.split_tag.len()
        )));
    }
    let sources = args
        .input
        .iter()
        .enumerate()
        .map(|(k, path)| {
            let split = match args.split_tag.get(k).map(String::as_str) {
                None => None,
                Some("train") => Some(true),
                Some("test") => Some(false),
                Some(other) => {
                    return Err(SpcaError::InvalidConfig(format!(
                        "split tag must be train or test, got `{other}`"
                    )))
                }
            };
            Ok(ConvertSource {
                path: path.clone(),
                group: args.group.get(k).copied(),
                split,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let dataset = convert_sources(&sources, args.from)?;
    save_labeled_csv(&dataset, &args.out)?;
    eprintln!(
        "wrote {} samples x {} features to {}",
        dataset.n_samples(),
        dataset.n_features(),
        args.out.display()
    );
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let spec = SparseFactorSpec {
        classes: args.classes,
        samples_per_class: args.per_class,
        features: args.features,
        seed: args.common.seed,
        ..Default::default()
    };
    let dataset = sparse_factor_dataset(&spec)?;
    save_labeled_csv(&dataset, &args.out)
}
