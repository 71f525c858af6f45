//! Command-line front end: train and persist models, predict labels and
//! probabilities, run benchmark protocols, and emit landscape/sweep CSV data
//! for plotting.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.
//! Data rows go to stdout; summaries and diagnostics go to stderr.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use popf::calibration;
use popf::dataset::{Dataset, DistanceMetric, RngSeed};
use popf::eval::{run_benchmark, MethodConfig, SplitSpec};
use popf::forest::TrainedForest;
use popf::io::{
    generate_synthetic, load_csv, load_libsvm, load_model, save_csv, save_model, ModelDocument,
    SyntheticSpec,
};
use popf::optim::{grid_evaluate, Algorithm, OptimizerConfig, SearchBox};

#[derive(Parser)]
#[command(
    name = "popf",
    version,
    about = "Optimum-path forest classification with probabilistic calibration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a forest, optionally with probability calibration, and save it
    Train(TrainArgs),
    /// Classify a dataset with a saved model
    Predict(PredictArgs),
    /// Repeated-holdout comparison of methods with Wilcoxon best-marks
    Benchmark(BenchmarkArgs),
    /// Rasterize the calibration objective over the search box
    Landscape(LandscapeArgs),
    /// Accuracy of a calibrated model over a grid of decision thresholds
    Sweep(SweepArgs),
    /// Generate a two-class Gaussian-blob dataset as CSV
    GenSynthetic(GenSyntheticArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Libsvm,
    Csv,
}

#[derive(Args)]
struct DataArgs {
    /// Input dataset path
    #[arg(long)]
    data: PathBuf,
    /// Input format
    #[arg(long, value_enum, default_value_t = DataFormat::Libsvm)]
    format: DataFormat,
    /// 0-based label column for CSV input; defaults to the last column
    #[arg(long)]
    label_column: Option<usize>,
    /// Treat the first CSV row as a header
    #[arg(long)]
    has_header: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Distance metric weighting the graph arcs
    #[arg(long, default_value = "euclidean", value_parser = parse_metric)]
    metric: DistanceMetric,
    /// Output model path
    #[arg(long)]
    out: PathBuf,
    /// Fit the probability calibration layer
    #[arg(long)]
    calibrate: bool,
    /// Optimizer for the calibration fit
    #[arg(long, value_enum, default_value_t = OptimizerArg::Nm)]
    optimizer: OptimizerArg,
    /// Original label to map to +1 (defaults to the larger of the two tags)
    #[arg(long)]
    positive_label: Option<i64>,
    #[arg(long, env = "POPF_SEED", default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct PredictArgs {
    /// Saved model path
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    /// Emit calibrated probabilities and path costs
    #[arg(long)]
    proba: bool,
    /// Decision threshold override, strictly inside (0, 1)
    #[arg(long, value_parser = parse_theta)]
    theta: Option<f64>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Comma-separated methods: opf, popf-nm, popf-pso, popf-ba, popf-ffa
    #[arg(long)]
    methods: String,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 0.25)]
    train_frac: f64,
    /// Disable stratified splitting
    #[arg(long)]
    no_stratify: bool,
    #[arg(long, env = "POPF_SEED", default_value_t = 42)]
    seed: u64,
    /// Directory receiving the per-run CSV and the summary table
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct LandscapeArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Lattice resolution per axis
    #[arg(long, default_value_t = 21)]
    steps: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    #[arg(long, env = "POPF_SEED", default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// Saved calibrated model path
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0.05, value_parser = parse_theta)]
    grid_start: f64,
    #[arg(long, default_value_t = 0.95, value_parser = parse_theta)]
    grid_end: f64,
    #[arg(long, default_value_t = 19)]
    grid_steps: usize,
}

#[derive(Args)]
struct GenSyntheticArgs {
    /// Total sample count (even; half per class)
    #[arg(long)]
    n: usize,
    /// Feature dimension
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Distance between class centers along every axis
    #[arg(long)]
    separation: f64,
    #[arg(long, env = "POPF_SEED", default_value_t = 42)]
    seed: u64,
    /// Output CSV path (label in the last column)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OptimizerArg {
    Nm,
    Pso,
    Ba,
    Ffa,
}

impl OptimizerArg {
    fn algorithm(self) -> Algorithm {
        let tag = match self {
            OptimizerArg::Nm => "nm",
            OptimizerArg::Pso => "pso",
            OptimizerArg::Ba => "ba",
            OptimizerArg::Ffa => "ffa",
        };
        Algorithm::from_tag(tag).unwrap()
    }
}

fn parse_metric(s: &str) -> Result<DistanceMetric, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_theta(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1)"))
    }
}

enum CliError {
    Usage(String),
    Lib(popf::Error),
}

impl From<popf::Error> for CliError {
    fn from(e: popf::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(popf::Error::Io(e))
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Lib(popf::Error::Optimization(_)) => 3,
            CliError::Lib(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

impl DataArgs {
    fn load(&self) -> Result<Dataset, CliError> {
        match self.format {
            DataFormat::Libsvm => Ok(load_libsvm(&self.data)?),
            DataFormat::Csv => {
                let label_column = match self.label_column {
                    Some(c) => c,
                    None => last_column_index(&self.data)?,
                };
                Ok(load_csv(&self.data, label_column, self.has_header)?)
            }
        }
    }
}

/// Index of the last column of a CSV file, from its first non-empty line.
fn last_column_index(path: &Path) -> Result<usize, CliError> {
    let content = std::fs::read_to_string(path)?;
    let first = content
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| CliError::Lib(popf::Error::Parse {
            line: 1,
            message: "empty dataset file".into(),
        }))?;
    Ok(first.split(',').count() - 1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Benchmark(args) => cmd_benchmark(args),
        Command::Landscape(args) => cmd_landscape(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::GenSynthetic(args) => cmd_gen_synthetic(args),
    }
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let mut dataset = args.data.load()?;
    if let Some(positive) = args.positive_label {
        dataset = dataset.to_binary(positive)?;
    }
    let forest = TrainedForest::train(&dataset, args.metric)?;
    eprintln!(
        "trained on {} samples ({} prototypes, metric {})",
        forest.len(),
        forest.prototype_count(),
        args.metric
    );
    let calibration = if args.calibrate {
        let seed = RngSeed(args.seed);
        let config = OptimizerConfig::new(args.optimizer.algorithm(), seed);
        let model = calibration::fit(&forest, &dataset, &config, seed)?;
        eprintln!(
            "calibrated with {}: A = {:.6}, B = {:.6}, nll = {:.6}",
            model.optimizer_used, model.a, model.b, model.final_nll
        );
        for warning in &model.diagnostics {
            eprintln!("warning: {warning}");
        }
        Some(model)
    } else {
        None
    };
    let document = ModelDocument::new(forest, dataset.label_map, calibration);
    save_model(&document, &args.out)?;
    eprintln!("model written to {}", args.out.display());
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let document = load_model(&args.model)?;
    let dataset = args.data.load()?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());

    if args.proba {
        let model = document.calibration.as_ref().ok_or_else(|| {
            popf::Error::UnsupportedDataset(
                "--proba requires a calibrated model (train with --calibrate)".into(),
            )
        })?;
        let label_map = document.label_map.ok_or_else(|| {
            popf::Error::ModelDocument("calibrated model lacks a label map".into())
        })?;
        let model = match args.theta {
            Some(theta) => model.clone().with_theta(theta)?,
            None => model.clone(),
        };
        writeln!(out, "index,label,probability,cost").map_err(popf::Error::Io)?;
        for (i, sample) in dataset.samples.iter().enumerate() {
            let (probability, prediction) =
                calibration::predict_proba(&document.forest, &model, sample)?;
            let decision = if probability >= model.theta { 1 } else { -1 };
            let label = label_map.original_label_of(decision);
            writeln!(out, "{i},{label},{probability},{}", prediction.cost)
                .map_err(popf::Error::Io)?;
        }
    } else {
        writeln!(out, "index,label").map_err(popf::Error::Io)?;
        for (i, sample) in dataset.samples.iter().enumerate() {
            let prediction = document.forest.classify(sample)?;
            writeln!(out, "{i},{}", prediction.label).map_err(popf::Error::Io)?;
        }
    }
    out.flush().map_err(popf::Error::Io)?;
    Ok(())
}

fn parse_methods(spec: &str, seed: RngSeed) -> Result<Vec<MethodConfig>, CliError> {
    let mut methods = Vec::new();
    for tag in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let method = match tag.to_ascii_lowercase().as_str() {
            "opf" => MethodConfig::Opf,
            "popf-nm" | "popf-pso" | "popf-ba" | "popf-ffa" => {
                let algorithm = Algorithm::from_tag(&tag[5..]).map_err(|e| {
                    CliError::Usage(format!("bad method {tag:?}: {e}"))
                })?;
                MethodConfig::Popf(OptimizerConfig::new(algorithm, seed))
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown method {other:?}; expected opf, popf-nm, popf-pso, popf-ba or popf-ffa"
                )))
            }
        };
        methods.push(method);
    }
    if methods.is_empty() {
        return Err(CliError::Usage("--methods lists no methods".into()));
    }
    Ok(methods)
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<(), CliError> {
    let seed = RngSeed(args.seed);
    let methods = parse_methods(&args.methods, seed)?;
    let dataset = args.data.load()?;
    let spec = SplitSpec {
        train_fraction: args.train_frac,
        runs: args.runs,
        stratified: !args.no_stratify,
        seed,
    };
    let report = run_benchmark(&dataset, &methods, &spec)?;

    std::fs::create_dir_all(&args.out_dir)?;
    let runs_path = args.out_dir.join(format!("{}_runs.csv", report.dataset));
    let summary_path = args.out_dir.join(format!("{}_summary.txt", report.dataset));
    report.write_runs_csv(File::create(&runs_path).map(BufWriter::new)?)?;
    report.write_summary(File::create(&summary_path).map(BufWriter::new)?)?;

    // fairness: every method of a run must have seen the same split
    for run in 0..report.runs {
        let hashes: Vec<u64> = report
            .records
            .iter()
            .filter(|r| r.run_index == run)
            .map(|r| r.split_hash)
            .collect();
        let identical = hashes.windows(2).all(|w| w[0] == w[1]);
        eprintln!(
            "run {run}: split fingerprint {:016x}, shared by all methods: {identical}",
            hashes[0]
        );
    }
    report.write_summary(std::io::stderr().lock()).map_err(popf::Error::Io)?;
    eprintln!("wrote {} and {}", runs_path.display(), summary_path.display());
    Ok(())
}

fn cmd_landscape(args: LandscapeArgs) -> Result<(), CliError> {
    let dataset = args.data.load()?;
    if dataset.label_map.is_none() {
        return Err(popf::Error::UnsupportedDataset(
            "landscape needs a two-class dataset".into(),
        )
        .into());
    }
    let spec = SplitSpec {
        train_fraction: 0.25,
        runs: 1,
        stratified: true,
        seed: RngSeed(args.seed),
    };
    let (train, _) = popf::eval::split(&dataset, &spec, 0)?;
    let forest = TrainedForest::train(&train, DistanceMetric::default())?;
    let scores: Vec<f64> = forest
        .samples()
        .iter()
        .zip(forest.costs())
        .map(|(s, &c)| f64::from(s.binary_label) * c)
        .collect();
    let scored = calibration::scored_samples(&scores, &train.binary_labels());
    let grid = grid_evaluate(
        |a, b| calibration::objective(a, b, &scored).expect("finite objective"),
        &SearchBox::default(),
        args.steps,
    )?;
    let mut out = BufWriter::new(File::create(&args.out)?);
    grid.write_csv(&mut out).map_err(popf::Error::Io)?;
    out.flush().map_err(popf::Error::Io)?;
    eprintln!(
        "landscape over {} training samples written to {}",
        train.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let document = load_model(&args.model)?;
    let model = document.calibration.as_ref().ok_or_else(|| {
        popf::Error::UnsupportedDataset("sweep requires a calibrated model".into())
    })?;
    let dataset = args.data.load()?;
    if args.grid_steps < 1 {
        return Err(CliError::Usage("--grid-steps must be at least 1".into()));
    }
    if args.grid_end < args.grid_start {
        return Err(CliError::Usage("--grid-end must not precede --grid-start".into()));
    }
    let grid: Vec<f64> = if args.grid_steps == 1 {
        vec![args.grid_start]
    } else {
        let h = (args.grid_end - args.grid_start) / (args.grid_steps - 1) as f64;
        (0..args.grid_steps)
            .map(|i| {
                if i == args.grid_steps - 1 {
                    args.grid_end
                } else {
                    args.grid_start + h * i as f64
                }
            })
            .collect()
    };
    let rows = calibration::threshold_sweep(&document.forest, model, &dataset, &grid)?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    writeln!(out, "theta,accuracy").map_err(popf::Error::Io)?;
    for (theta, accuracy) in rows {
        writeln!(out, "{theta},{accuracy}").map_err(popf::Error::Io)?;
    }
    out.flush().map_err(popf::Error::Io)?;
    Ok(())
}

fn cmd_gen_synthetic(args: GenSyntheticArgs) -> Result<(), CliError> {
    let spec = SyntheticSpec {
        n_samples: args.n,
        n_features: args.d,
        class_separation: args.separation,
        seed: RngSeed(args.seed),
    };
    let dataset = generate_synthetic(&spec)?;
    save_csv(&dataset, &args.out)?;
    eprintln!(
        "wrote {} samples x {} features to {}",
        dataset.len(),
        dataset.dimension,
        args.out.display()
    );
    Ok(())
}
