//! Repeated-run experiment protocol.
//!
//! Every run splits the data into stratified halves, down-samples the
//! training minority class, fits a min-max normalizer on what remains,
//! optionally augments the training set, trains a classifier and scores the
//! test half. Run `i` derives all of its randomness from `master_seed + i`,
//! so results do not depend on scheduling and runs execute in parallel.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{resample, BaselineMethod, BaselineSpec};
use crate::classifier::{KnnClassifier, Mlp, MlpConfig, ProbabilisticClassifier};
use crate::dataset::{
    downsample_minority, load_csv, split, CsvOptions, Dataset, ImbalanceSpec, Normalizer, SplitSpec,
};
use crate::error::{Error, Result};
use crate::metrics::{confusion, gmean, roc_auc, summarize};
use crate::mixboost::{self, LabelMode, LambdaDist, MixConfig, SelectionStrategy};
use crate::rng::derive_seed;
use crate::stats::{bayesian_signed_test, simplex_points, DirichletConfig, SignedTestResult, SimplexPoint};

/// Augmentation applied to the training half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    None,
    MixBoost,
    Baseline(BaselineMethod),
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::None,
        Method::MixBoost,
        Method::Baseline(BaselineMethod::Ros),
        Method::Baseline(BaselineMethod::Rus),
        Method::Baseline(BaselineMethod::Smote),
        Method::Baseline(BaselineMethod::BorderlineSmote1),
        Method::Baseline(BaselineMethod::BorderlineSmote2),
        Method::Baseline(BaselineMethod::Adasyn),
        Method::Baseline(BaselineMethod::SmoteTomek),
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::None => "none",
            Method::MixBoost => "mixboost",
            Method::Baseline(BaselineMethod::Ros) => "ros",
            Method::Baseline(BaselineMethod::Rus) => "rus",
            Method::Baseline(BaselineMethod::Smote) => "smote",
            Method::Baseline(BaselineMethod::BorderlineSmote1) => "b1",
            Method::Baseline(BaselineMethod::BorderlineSmote2) => "b2",
            Method::Baseline(BaselineMethod::Adasyn) => "adasyn",
            Method::Baseline(BaselineMethod::SmoteTomek) => "smote_tomek",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method {s:?}")))
    }
}

pub fn strategy_name(s: SelectionStrategy) -> &'static str {
    match s {
        SelectionStrategy::Random => "R",
        SelectionStrategy::EntropyWeighted => "EW",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    Mlp,
    Knn { k: usize },
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierKind::Mlp => f.write_str("mlp"),
            ClassifierKind::Knn { k } => write!(f, "knn{k}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub datasets: Vec<PathBuf>,
    pub csv: CsvOptions,
    pub method: Method,
    pub min_count: usize,
    pub runs: usize,
    /// Synthetic rows as a multiple of the (down-sampled) training size.
    pub synthetic_multiple: f64,
    pub train_fraction: f64,
    /// Strategy, iterations, alpha, label and lambda settings for MixBoost.
    /// Its seed and synthetic count are set per run.
    pub mix: MixConfig,
    /// Its seed is set per run.
    pub mlp: MlpConfig,
    pub classifier: ClassifierKind,
    pub k_neighbors: usize,
    pub master_seed: u64,
    pub fail_fast: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            datasets: Vec::new(),
            csv: CsvOptions::default(),
            method: Method::MixBoost,
            min_count: 4,
            runs: 30,
            synthetic_multiple: 1.0,
            train_fraction: 0.5,
            mix: MixConfig::default(),
            mlp: MlpConfig::default(),
            classifier: ClassifierKind::Mlp,
            k_neighbors: 5,
            master_seed: 0,
            fail_fast: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::InvalidConfig("no dataset given".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if self.min_count == 0 {
            return Err(Error::InvalidConfig("min_count must be at least 1".into()));
        }
        if !(self.synthetic_multiple >= 0.0 && self.synthetic_multiple.is_finite()) {
            return Err(Error::InvalidConfig("synthetic multiple must be nonnegative".into()));
        }
        if self.method == Method::MixBoost && self.classifier != ClassifierKind::Mlp {
            return Err(Error::InvalidConfig(
                "mixboost retrains on soft labels and needs the mlp classifier".into(),
            ));
        }
        self.mix.validate()?;
        self.mlp.validate()
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.master_seed.wrapping_add(run as u64)
    }

    pub fn strategy_label(&self) -> &'static str {
        if self.method == Method::MixBoost {
            strategy_name(self.mix.strategy)
        } else {
            "-"
        }
    }

    /// `key=value` lines describing every setting.
    pub fn dump(&self) -> String {
        let lambda = match self.mix.lambda_dist {
            LambdaDist::Beta => "beta".to_string(),
            LambdaDist::Uniform => "uniform".to_string(),
            LambdaDist::Fixed(v) => format!("fixed:{v}"),
        };
        let label_mode = match self.mix.label_mode {
            LabelMode::Soft => "soft",
            LabelMode::OneHot => "one_hot",
        };
        let datasets: Vec<String> = self.datasets.iter().map(|p| p.display().to_string()).collect();
        let hidden: Vec<String> = self.mlp.hidden_layers.iter().map(ToString::to_string).collect();
        let mut lines = vec![
            format!("datasets={}", datasets.join(";")),
            format!("method={}", self.method),
            format!("strategy={}", self.strategy_label()),
            format!("classifier={}", self.classifier),
            format!("min_count={}", self.min_count),
            format!("runs={}", self.runs),
            format!("synthetic_multiple={}", self.synthetic_multiple),
            format!("train_fraction={}", self.train_fraction),
            format!("iterations={}", self.mix.iterations),
            format!("alpha={}", self.mix.alpha),
            format!("lambda_dist={lambda}"),
            format!("label_mode={label_mode}"),
            format!("warm_start={}", self.mix.warm_start),
            format!("hidden_layers={}", hidden.join(",")),
            format!("learning_rate={}", self.mlp.learning_rate),
            format!("batch_size={}", self.mlp.batch_size),
            format!("epochs={}", self.mlp.epochs),
            format!("k_neighbors={}", self.k_neighbors),
            format!("master_seed={}", self.master_seed),
            format!("fail_fast={}", self.fail_fast),
            "threshold=0.5".to_string(),
            "std=population".to_string(),
        ];
        lines.push(String::new());
        lines.join("\n")
    }
}

/// Metrics of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub run: usize,
    pub dataset: String,
    pub method: String,
    pub strategy: String,
    pub classifier: String,
    pub min_count: usize,
    pub gmean: f64,
    pub roc_auc: f64,
}

/// Wall time of one run, kept apart from the metrics so result files are
/// reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTiming {
    pub run: usize,
    pub dataset: String,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub run: usize,
    pub dataset: String,
    pub kind: String,
    pub message: String,
}

/// Mean and population standard deviation per dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub method: String,
    pub strategy: String,
    pub classifier: String,
    pub min_count: usize,
    pub runs: usize,
    pub gmean_mean: f64,
    pub gmean_std_pop: f64,
    pub roc_auc_mean: f64,
    pub roc_auc_std_pop: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub records: Vec<ResultRecord>,
    pub timings: Vec<RunTiming>,
    pub failures: Vec<RunFailure>,
    pub summaries: Vec<SummaryRow>,
    pub warnings: Vec<String>,
}

pub fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

struct RunOutput {
    gmean: f64,
    roc_auc: f64,
    warnings: Vec<String>,
}

fn fit_and_score(
    config: &ExperimentConfig,
    train: &Dataset,
    test: &Dataset,
    mlp: &MlpConfig,
) -> Result<Vec<f64>> {
    Ok(match config.classifier {
        ClassifierKind::Mlp => Mlp::fit(mlp, train)?.0.minority_scores(test),
        ClassifierKind::Knn { k } => {
            KnnClassifier::new(train.clone(), k.min(train.len()))?.minority_scores(test)
        }
    })
}

/// Executes one run of the protocol on an already loaded dataset.
pub fn run_once(config: &ExperimentConfig, data: &Dataset, run: usize) -> Result<(f64, f64, Vec<String>)> {
    let out = run_inner(config, data, run)?;
    Ok((out.gmean, out.roc_auc, out.warnings))
}

fn run_inner(config: &ExperimentConfig, data: &Dataset, run: usize) -> Result<RunOutput> {
    let seed = config.run_seed(run);
    let (train, test) = split(
        data,
        &SplitSpec {
            train_fraction: config.train_fraction,
            seed: derive_seed(seed, 0),
        },
    )?;
    let train = downsample_minority(
        &train,
        &ImbalanceSpec {
            minority_count: config.min_count,
            seed: derive_seed(seed, 1),
        },
    )?;
    let normalizer = Normalizer::fit(&train)?;
    let train = normalizer.apply(&train)?;
    let test = normalizer.apply(&test)?;

    let n_syn = (config.synthetic_multiple * train.len() as f64).round() as usize;
    let mlp = MlpConfig {
        seed: derive_seed(seed, 3),
        ..config.mlp.clone()
    };
    let mut warnings = Vec::new();
    let scores = match config.method {
        Method::None => fit_and_score(config, &train, &test, &mlp)?,
        Method::MixBoost => {
            let mix = MixConfig {
                total_synthetic: Some(n_syn),
                seed: derive_seed(seed, 2),
                ..config.mix.clone()
            };
            let outcome = mixboost::run(&train, &mix, &mlp)?;
            warnings.extend(outcome.warnings);
            outcome.model.minority_scores(&test)
        }
        Method::Baseline(method) => {
            let target = if method == BaselineMethod::Rus {
                train.majority_count().saturating_sub(train.minority_count())
            } else {
                n_syn
            };
            let spec = BaselineSpec {
                method,
                k_neighbors: config.k_neighbors,
                target_count: target,
                seed: derive_seed(seed, 2),
            };
            let resampled = resample(&train, &spec)?;
            warnings.extend(resampled.warnings);
            fit_and_score(config, &resampled.data, &test, &mlp)?
        }
    };
    let counts = confusion(&scores, test.labels(), 0.5)?;
    Ok(RunOutput {
        gmean: gmean(&counts)?,
        roc_auc: roc_auc(&scores, test.labels())?,
        warnings: warnings
            .into_iter()
            .map(|w| format!("run {run}: {w}"))
            .collect(),
    })
}

/// Runs every configured dataset `config.runs` times.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut report = ExperimentReport::default();
    for path in &config.datasets {
        let data = load_csv(path, &config.csv)?;
        let name = dataset_name(path);
        let outcomes: Vec<(usize, f64, Result<RunOutput>)> = (0..config.runs)
            .into_par_iter()
            .map(|run| {
                let start = Instant::now();
                let out = run_inner(config, &data, run);
                (run, start.elapsed().as_secs_f64() * 1e3, out)
            })
            .collect();

        let mut gmeans = Vec::new();
        let mut aucs = Vec::new();
        for (run, wall_ms, out) in outcomes {
            report.timings.push(RunTiming {
                run,
                dataset: name.clone(),
                wall_ms,
            });
            match out {
                Ok(out) => {
                    gmeans.push(out.gmean);
                    aucs.push(out.roc_auc);
                    report.warnings.extend(out.warnings);
                    report.records.push(ResultRecord {
                        run,
                        dataset: name.clone(),
                        method: config.method.to_string(),
                        strategy: config.strategy_label().to_string(),
                        classifier: config.classifier.to_string(),
                        min_count: config.min_count,
                        gmean: out.gmean,
                        roc_auc: out.roc_auc,
                    });
                }
                Err(e) if config.fail_fast => return Err(e),
                Err(e) => report.failures.push(RunFailure {
                    run,
                    dataset: name.clone(),
                    kind: e.kind().to_string(),
                    message: e.to_string(),
                }),
            }
        }
        if gmeans.is_empty() {
            continue;
        }
        let g = summarize(&gmeans)?;
        let a = summarize(&aucs)?;
        report.summaries.push(SummaryRow {
            dataset: name,
            method: config.method.to_string(),
            strategy: config.strategy_label().to_string(),
            classifier: config.classifier.to_string(),
            min_count: config.min_count,
            runs: gmeans.len(),
            gmean_mean: g.mean,
            gmean_std_pop: g.std,
            roc_auc_mean: a.mean,
            roc_auc_std_pop: a.std,
        });
    }
    Ok(report)
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_csv_rows<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

fn write_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Writes `results.csv`, `summary.csv`, `timings.csv`, `config.txt` and,
/// when any run failed, `failures.csv` into `dir`.
pub fn write_report(report: &ExperimentReport, config: &ExperimentConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("results.csv"), |b| write_csv(&report.records, b))?;
    write_file(&dir.join("summary.csv"), |b| write_csv(&report.summaries, b))?;
    write_file(&dir.join("timings.csv"), |b| write_csv(&report.timings, b))?;
    write_file(&dir.join("config.txt"), |b| {
        b.extend_from_slice(config.dump().as_bytes());
        Ok(())
    })?;
    let failures = dir.join("failures.csv");
    if report.failures.is_empty() {
        if failures.exists() {
            std::fs::remove_file(&failures).map_err(|e| Error::io(&failures, e))?;
        }
    } else {
        write_file(&failures, |b| write_csv(&report.failures, b))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareMetric {
    Gmean,
    RocAuc,
}

/// How several summary rows sharing a dataset key are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    /// Duplicate keys are an error.
    Single,
    /// Best mean over all rows of the key (e.g. across classifiers or
    /// baseline methods).
    Max,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    /// `(dataset key, B - A)` in key order.
    pub differences: Vec<(String, f64)>,
    pub result: SignedTestResult,
    pub points: Vec<SimplexPoint>,
}

fn keyed(rows: &[SummaryRow], metric: CompareMetric, aggregate: Aggregate) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for row in rows {
        let key = format!("{}@{}", row.dataset, row.min_count);
        let value = match metric {
            CompareMetric::Gmean => row.gmean_mean,
            CompareMetric::RocAuc => row.roc_auc_mean,
        };
        match (map.get_mut(&key), aggregate) {
            (None, _) => {
                map.insert(key, value);
            }
            (Some(v), Aggregate::Max) => *v = f64::max(*v, value),
            (Some(_), Aggregate::Single) => {
                return Err(Error::InvalidConfig(format!(
                    "dataset key {key} appears more than once; use max aggregation"
                )))
            }
        }
    }
    Ok(map)
}

/// Bayesian signed test of method B against method A over matching
/// dataset keys (`dataset@min_count`).
pub fn compare(
    a: &[SummaryRow],
    b: &[SummaryRow],
    metric: CompareMetric,
    aggregate: Aggregate,
    config: &DirichletConfig,
) -> Result<Comparison> {
    let left = keyed(a, metric, aggregate)?;
    let right = keyed(b, metric, aggregate)?;
    let missing_left: Vec<&str> = right.keys().filter(|k| !left.contains_key(*k)).map(String::as_str).collect();
    let missing_right: Vec<&str> = left.keys().filter(|k| !right.contains_key(*k)).map(String::as_str).collect();
    if !missing_left.is_empty() || !missing_right.is_empty() {
        return Err(Error::KeyMismatch {
            missing_left: missing_left.join(", "),
            missing_right: missing_right.join(", "),
        });
    }
    let differences: Vec<(String, f64)> = left
        .iter()
        .map(|(k, va)| (k.clone(), right[k] - va))
        .collect();
    let deltas: Vec<f64> = differences.iter().map(|(_, d)| *d).collect();
    let result = bayesian_signed_test(&deltas, config)?;
    let points = simplex_points(&deltas, config)?;
    Ok(Comparison {
        differences,
        result,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    MinCount(Vec<usize>),
    /// Synthetic rows as multiples of the training size.
    Synthetic(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub dataset: String,
    pub runs: usize,
    pub gmean_mean: f64,
    pub gmean_std_pop: f64,
    pub roc_auc_mean: f64,
    pub roc_auc_std_pop: f64,
}

/// Re-runs the experiment for each axis value.
pub fn sweep(config: &ExperimentConfig, axis: &SweepAxis) -> Result<Vec<SweepRow>> {
    let (name, values): (&str, Vec<f64>) = match axis {
        SweepAxis::MinCount(v) => ("min_count", v.iter().map(|&x| x as f64).collect()),
        SweepAxis::Synthetic(v) => ("n_syn", v.clone()),
    };
    if values.is_empty() {
        return Err(Error::InvalidConfig("sweep axis has no values".into()));
    }
    let mut rows = Vec::new();
    for (i, &value) in values.iter().enumerate() {
        let mut cfg = config.clone();
        match axis {
            SweepAxis::MinCount(v) => cfg.min_count = v[i],
            SweepAxis::Synthetic(_) => cfg.synthetic_multiple = value,
        }
        let report = run_experiment(&cfg)?;
        for s in report.summaries {
            rows.push(SweepRow {
                axis: name.to_string(),
                value,
                dataset: s.dataset,
                runs: s.runs,
                gmean_mean: s.gmean_mean,
                gmean_std_pop: s.gmean_std_pop,
                roc_auc_mean: s.roc_auc_mean,
                roc_auc_std_pop: s.roc_auc_std_pop,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("swim".parse::<Method>().is_err());
    }

    #[test]
    fn run_seeds_are_distinct() {
        let cfg = ExperimentConfig {
            master_seed: 17,
            ..ExperimentConfig::default()
        };
        let seeds: std::collections::BTreeSet<u64> = (0..30).map(|r| cfg.run_seed(r)).collect();
        assert_eq!(seeds.len(), 30);
        assert_eq!(cfg.run_seed(3), 20);
    }

    fn row(dataset: &str, g: f64) -> SummaryRow {
        SummaryRow {
            dataset: dataset.into(),
            method: "m".into(),
            strategy: "-".into(),
            classifier: "mlp".into(),
            min_count: 4,
            runs: 30,
            gmean_mean: g,
            gmean_std_pop: 0.0,
            roc_auc_mean: g,
            roc_auc_std_pop: 0.0,
        }
    }

    #[test]
    fn compare_key_mismatch() {
        let a = vec![row("x", 0.5), row("y", 0.5)];
        let b = vec![row("x", 0.5), row("z", 0.5)];
        let err = compare(&a, &b, CompareMetric::Gmean, Aggregate::Single, &DirichletConfig::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("z@4") && msg.contains("y@4"), "{msg}");
    }

    #[test]
    fn compare_max_aggregation() {
        let a = vec![row("x", 0.5), row("x", 0.7), row("y", 0.1)];
        let m = keyed(&a, CompareMetric::Gmean, Aggregate::Max).unwrap();
        assert_eq!(m["x@4"], 0.7);
        assert!(keyed(&a, CompareMetric::Gmean, Aggregate::Single).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_err());
        cfg.datasets.push("x.csv".into());
        assert!(cfg.validate().is_ok());
        cfg.classifier = ClassifierKind::Knn { k: 3 };
        assert!(cfg.validate().is_err());
        cfg.method = Method::None;
        assert!(cfg.validate().is_ok());
        cfg.runs = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn empty_sweep_is_an_error() {
        let cfg = ExperimentConfig::default();
        assert!(sweep(&cfg, &SweepAxis::MinCount(vec![])).is_err());
    }
}
