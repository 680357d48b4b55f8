//! Experiment runner: `run`, `compare` and `sweep`.

use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mixboost::classifier::MlpConfig;
use mixboost::experiment::{
    compare, read_csv_rows, run_experiment, sweep, write_csv, write_report, Aggregate, ClassifierKind,
    CompareMetric, ExperimentConfig, Method, SummaryRow, SweepAxis,
};
use mixboost::mixboost::{LabelMode, LambdaDist, MixConfig, SelectionStrategy};
use mixboost::stats::{write_simplex_csv, DirichletConfig};
use mixboost::{Error, Result};

#[derive(Parser)]
#[command(name = "mixboost", version, about = "Boosted mixup oversampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repeated split/down-sample/augment/train/evaluate runs.
    Run(RunArgs),
    /// Bayesian signed test between two summary.csv files (B - A).
    Compare(CompareArgs),
    /// Repeat `run` over a list of minority counts or synthetic multiples.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Dataset CSV with a header and the class label in the last column.
    #[arg(long = "dataset", required = true)]
    datasets: Vec<PathBuf>,
    /// none, mixboost, ros, rus, smote, b1, b2, adasyn or smote_tomek.
    #[arg(long, default_value = "mixboost")]
    method: Method,
    /// R or EW (mixboost only).
    #[arg(long, default_value = "R")]
    strategy: SelectionStrategy,
    #[arg(long, default_value_t = 4)]
    min_count: usize,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    /// Master seed; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 5)]
    iterations: usize,
    /// beta, uniform or fixed:<value>.
    #[arg(long, default_value = "beta")]
    lambda_dist: LambdaDist,
    /// soft or one_hot.
    #[arg(long, default_value = "soft")]
    label_mode: LabelMode,
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-4)]
    learning_rate: f64,
    /// Synthetic rows as a multiple of the training size.
    #[arg(long, default_value_t = 1.0)]
    synthetic: f64,
    /// Use a k-nearest-neighbour classifier instead of the MLP.
    #[arg(long)]
    knn: Option<usize>,
    /// Abort on the first failed run.
    #[arg(long)]
    fail_fast: bool,
}

impl ExperimentArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            datasets: self.datasets.clone(),
            method: self.method,
            min_count: self.min_count,
            runs: self.runs,
            synthetic_multiple: self.synthetic,
            mix: MixConfig {
                iterations: self.iterations,
                alpha: self.alpha,
                strategy: self.strategy,
                label_mode: self.label_mode,
                lambda_dist: self.lambda_dist,
                ..MixConfig::default()
            },
            mlp: MlpConfig {
                learning_rate: self.learning_rate,
                epochs: self.epochs,
                ..MlpConfig::default()
            },
            classifier: self.knn.map_or(ClassifierKind::Mlp, |k| ClassifierKind::Knn { k }),
            master_seed: self.seed,
            fail_fast: self.fail_fast,
            ..ExperimentConfig::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Gmean,
    RocAuc,
}

#[derive(Args)]
struct CompareArgs {
    /// summary.csv of method A.
    a: PathBuf,
    /// summary.csv of method B.
    b: PathBuf,
    #[arg(long, value_enum, default_value = "gmean")]
    metric: MetricArg,
    /// Take the best mean when a dataset appears several times.
    #[arg(long)]
    max: bool,
    #[arg(long, default_value_t = 0.01)]
    rope: f64,
    #[arg(long, default_value_t = 50_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the posterior simplex points.
    #[arg(long)]
    simplex: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    MinCount,
    NSyn,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, value_enum)]
    axis: AxisArg,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
}

fn create(path: &PathBuf) -> Result<File> {
    File::create(path).map_err(|e| Error::InvalidConfig(format!("cannot create {}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let config = args.experiment.config();
            let report = run_experiment(&config)?;
            write_report(&report, &config, &args.out)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for s in &report.summaries {
                println!(
                    "{} {} {} min_count={} runs={} gmean={:.4}±{:.4} roc_auc={:.4}±{:.4}",
                    s.dataset,
                    s.method,
                    s.strategy,
                    s.min_count,
                    s.runs,
                    s.gmean_mean,
                    s.gmean_std_pop,
                    s.roc_auc_mean,
                    s.roc_auc_std_pop
                );
            }
            if let Some(f) = report.failures.first() {
                return Err(Error::InvalidConfig(format!(
                    "{} of {} runs failed, first: {} run {}: {}",
                    report.failures.len(),
                    report.failures.len() + report.records.len(),
                    f.dataset,
                    f.run,
                    f.message
                )));
            }
            Ok(())
        }
        Command::Compare(args) => {
            let a: Vec<SummaryRow> = read_csv_rows(&args.a)?;
            let b: Vec<SummaryRow> = read_csv_rows(&args.b)?;
            let config = DirichletConfig {
                rope_width: args.rope,
                posterior_samples: args.samples,
                seed: args.seed,
                ..DirichletConfig::default()
            };
            let metric = match args.metric {
                MetricArg::Gmean => CompareMetric::Gmean,
                MetricArg::RocAuc => CompareMetric::RocAuc,
            };
            let aggregate = if args.max { Aggregate::Max } else { Aggregate::Single };
            let c = compare(&a, &b, metric, aggregate, &config)?;
            if let Some(path) = &args.simplex {
                write_simplex_csv(&c.points, create(path)?)?;
            }
            println!(
                "p_left={:.4} p_rope={:.4} p_right={:.4}",
                c.result.p_left, c.result.p_rope, c.result.p_right
            );
            Ok(())
        }
        Command::Sweep(args) => {
            let config = args.experiment.config();
            let axis = match args.axis {
                AxisArg::MinCount => SweepAxis::MinCount(args.values.iter().map(|&v| v as usize).collect()),
                AxisArg::NSyn => SweepAxis::Synthetic(args.values.clone()),
            };
            let rows = sweep(&config, &axis)?;
            write_csv(&rows, create(&args.out)?)?;
            println!("{} rows written to {}", rows.len(), args.out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error: kind={} message={message}", e.kind());
            ExitCode::FAILURE
        }
    }
}
