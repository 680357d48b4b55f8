//! Iterative boosted-mixup oversampling.
//!
//! Each iteration selects majority/minority candidate pairs from the
//! original training rows (uniformly, or weighted by the current model's
//! prediction entropy), interpolates them into soft-labelled hybrids,
//! appends the hybrids to the augmented set and retrains the classifier.
//!
//! ```no_run
//! use mixboost::classifier::MlpConfig;
//! use mixboost::dataset::{load_csv, CsvOptions};
//! use mixboost::mixboost::{run, MixConfig, SelectionStrategy};
//!
//! let train = load_csv("train.csv", &CsvOptions::default())?;
//! let config = MixConfig {
//!     strategy: SelectionStrategy::EntropyWeighted,
//!     ..MixConfig::default()
//! };
//! let outcome = run(&train, &config, &MlpConfig::default())?;
//! println!("{} rows after augmentation", outcome.augmented.len());
//! # Ok::<(), mixboost::Error>(())
//! ```

mod entropy;
mod mix;
mod selection;

use std::io::Write;

pub use entropy::{entropy, ClassRows, EntropyTable, SelectionProbabilities, LOW_SIDE_EPSILON};
pub use mix::{mix_pair, sample_lambda, HybridInstance};
pub use selection::{ew_select_pair, r_select_pair, CandidatePair, EwSelector};

use rand::Rng;

use crate::classifier::{Mlp, MlpConfig, ProbabilisticClassifier};
use crate::dataset::{Dataset, MAJORITY, MINORITY};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStrategy {
    /// Uniform within each class.
    Random,
    /// Low-high entropy-weighted.
    EntropyWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelMode {
    Soft,
    OneHot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaDist {
    /// Beta(alpha, alpha).
    Beta,
    /// Uniform(0, 1).
    Uniform,
    /// Always the given value.
    Fixed(f64),
}

impl std::str::FromStr for SelectionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" | "random" => Ok(Self::Random),
            "EW" | "ew" | "entropy" => Ok(Self::EntropyWeighted),
            _ => Err(Error::InvalidConfig(format!("unknown strategy {s:?}"))),
        }
    }
}

impl std::str::FromStr for LabelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "soft" => Ok(Self::Soft),
            "one_hot" | "onehot" => Ok(Self::OneHot),
            _ => Err(Error::InvalidConfig(format!("unknown label mode {s:?}"))),
        }
    }
}

/// `beta`, `uniform` or `fixed:<value>`.
impl std::str::FromStr for LambdaDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "beta" => Ok(Self::Beta),
            None if s == "uniform" => Ok(Self::Uniform),
            Some(("fixed", v)) => v
                .parse()
                .map(Self::Fixed)
                .map_err(|_| Error::InvalidConfig(format!("bad fixed lambda {v:?}"))),
            _ => Err(Error::InvalidConfig(format!("unknown lambda distribution {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixConfig {
    pub iterations: usize,
    /// Total hybrids over all iterations; `None` means one per training row.
    pub total_synthetic: Option<usize>,
    pub alpha: f64,
    pub strategy: SelectionStrategy,
    pub label_mode: LabelMode,
    pub lambda_dist: LambdaDist,
    /// Continue training the previous model instead of reinitialising.
    pub warm_start: bool,
    pub seed: u64,
}

impl Default for MixConfig {
    fn default() -> Self {
        Self {
            iterations: 5,
            total_synthetic: None,
            alpha: 0.5,
            strategy: SelectionStrategy::Random,
            label_mode: LabelMode::Soft,
            lambda_dist: LambdaDist::Beta,
            warm_start: false,
            seed: 0,
        }
    }
}

impl MixConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("at least one iteration required".into()));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!("alpha {} must be positive", self.alpha)));
        }
        if let LambdaDist::Fixed(v) = self.lambda_dist {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("fixed lambda {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Fraction of the synthetic budget generated per iteration.
    pub fn per_iteration_fraction(&self) -> f64 {
        1.0 / self.iterations as f64
    }
}

/// Hybrids generated in each iteration: an even split where the first
/// `n_syn % k` iterations take one extra.
pub fn iteration_schedule(n_syn: usize, iterations: usize) -> Vec<usize> {
    let base = n_syn / iterations;
    let extra = n_syn % iterations;
    (0..iterations).map(|i| base + usize::from(i < extra)).collect()
}

/// Hybrids of one iteration plus the entropy table of the model that
/// selected them.
#[derive(Debug, Clone)]
pub struct IterationOutput {
    pub hybrids: Vec<HybridInstance>,
    pub table: EntropyTable,
}

/// One Boost + Mix pass producing `count` hybrids from `train_orig`.
pub fn run_iteration<C, R>(
    train_orig: &Dataset,
    model: &C,
    config: &MixConfig,
    count: usize,
    rng: &mut R,
) -> Result<IterationOutput>
where
    C: ProbabilisticClassifier + ?Sized,
    R: Rng + ?Sized,
{
    let table = EntropyTable::compute(model, train_orig)?;
    let ew = match config.strategy {
        SelectionStrategy::EntropyWeighted => Some(EwSelector::new(&table)?),
        SelectionStrategy::Random => None,
    };
    let mut hybrids = Vec::with_capacity(count);
    for _ in 0..count {
        let pair = match &ew {
            Some(selector) => selector.select(rng),
            None => r_select_pair(table.rows(), rng)?,
        };
        let lambda = sample_lambda(config.lambda_dist, config.alpha, rng)?;
        let mut hybrid = mix_pair(
            train_orig.row(pair.majority),
            train_orig.row(pair.minority),
            lambda,
            config.label_mode,
        )?;
        hybrid.sources = Some(pair);
        hybrids.push(hybrid);
    }
    Ok(IterationOutput { hybrids, table })
}

/// Per-iteration bookkeeping.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IterationTrace {
    pub iteration: usize,
    pub hybrids_added: usize,
    /// Final-epoch loss of the model refit after adding this iteration's
    /// hybrids.
    pub train_loss: f64,
    /// Mean entropy of the selecting model on original majority rows.
    pub mean_entropy_majority: f64,
    pub mean_entropy_minority: f64,
}

pub fn write_trace_csv<W: Write>(trace: &[IterationTrace], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in trace {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| Error::io("<trace>", e))?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct MixBoostOutcome {
    /// Original rows followed by every generated hybrid.
    pub augmented: Dataset,
    pub model: Mlp,
    /// Final-epoch loss of the fit on the original rows alone.
    pub initial_loss: f64,
    pub trace: Vec<IterationTrace>,
    pub warnings: Vec<String>,
}

/// Full augment-and-retrain loop.
pub fn run(train_orig: &Dataset, config: &MixConfig, classifier: &MlpConfig) -> Result<MixBoostOutcome> {
    config.validate()?;
    classifier.validate()?;
    ClassRows::of(train_orig)?;

    let n_syn = config.total_synthetic.unwrap_or(train_orig.len());
    let schedule = iteration_schedule(n_syn, config.iterations);
    let mut rng = rng::seeded(config.seed);
    let fit_config = |iteration: usize| MlpConfig {
        seed: rng::derive_seed(classifier.seed, iteration as u64),
        ..classifier.clone()
    };

    let (mut model, report) = Mlp::fit(&fit_config(0), train_orig)?;
    let initial_loss = report.final_loss();
    let mut augmented = train_orig.clone();
    let mut trace = Vec::with_capacity(config.iterations);
    let mut warnings = Vec::new();
    let mut last_loss = initial_loss;

    for (i, &count) in schedule.iter().enumerate() {
        let iteration = i + 1;
        let wrap = |source| Error::Iteration {
            iteration,
            source: Box::new(source),
        };
        let output = run_iteration(train_orig, &model, config, count, &mut rng).map_err(wrap)?;
        if config.strategy == SelectionStrategy::EntropyWeighted {
            for (class, name) in [(MAJORITY, "majority"), (MINORITY, "minority")] {
                if output.table.is_degenerate(class) {
                    warnings.push(format!(
                        "iteration {iteration}: all {name} entropies are zero; selecting uniformly"
                    ));
                }
            }
        }
        for hybrid in &output.hybrids {
            augmented.push(&hybrid.features, hybrid.label).map_err(wrap)?;
        }
        if count > 0 {
            augmented.mark_augmented();
            let cfg = fit_config(iteration);
            let (next, report) = if config.warm_start {
                model.fit_from(&cfg, &augmented)
            } else {
                Mlp::fit(&cfg, &augmented)
            }
            .map_err(wrap)?;
            model = next;
            last_loss = report.final_loss();
        }
        trace.push(IterationTrace {
            iteration,
            hybrids_added: count,
            train_loss: last_loss,
            mean_entropy_majority: output.table.mean_entropy(MAJORITY),
            mean_entropy_minority: output.table.mean_entropy(MINORITY),
        });
    }

    Ok(MixBoostOutcome {
        augmented,
        model,
        initial_loss,
        trace,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn option_parsing() {
        assert_eq!("EW".parse::<SelectionStrategy>().unwrap(), SelectionStrategy::EntropyWeighted);
        assert_eq!("one_hot".parse::<LabelMode>().unwrap(), LabelMode::OneHot);
        assert_eq!("fixed:0.3".parse::<LambdaDist>().unwrap(), LambdaDist::Fixed(0.3));
        assert_eq!("beta".parse::<LambdaDist>().unwrap(), LambdaDist::Beta);
        assert!("fixed:x".parse::<LambdaDist>().is_err());
        assert!("gauss".parse::<LambdaDist>().is_err());
    }

    fn toy() -> Dataset {
        let mut rows = Vec::new();
        let mut classes = Vec::new();
        for i in 0..20 {
            rows.push(vec![0.1 + 0.01 * i as f64, 0.3 - 0.01 * i as f64]);
            classes.push(0);
        }
        for i in 0..4 {
            rows.push(vec![0.8 + 0.02 * i as f64, 0.7 + 0.03 * i as f64]);
            classes.push(1);
        }
        Dataset::from_classes(rows, &classes).unwrap()
    }

    fn quick_mlp() -> MlpConfig {
        MlpConfig {
            epochs: 20,
            learning_rate: 1e-2,
            hidden_layers: vec![8],
            ..MlpConfig::default()
        }
    }

    #[test]
    fn schedules() {
        assert_eq!(iteration_schedule(100, 5), vec![20; 5]);
        assert_eq!(iteration_schedule(7, 5), vec![2, 2, 1, 1, 1]);
        assert_eq!(iteration_schedule(3, 5), vec![1, 1, 1, 0, 0]);
        assert_eq!(iteration_schedule(7, 1), vec![7]);
    }

    #[test]
    fn run_bookkeeping_and_determinism() {
        let train = toy();
        let config = MixConfig {
            seed: 4,
            ..MixConfig::default()
        };
        let a = run(&train, &config, &quick_mlp()).unwrap();
        assert_eq!(a.augmented.len(), 2 * train.len());
        assert!(a.augmented.is_augmented());
        assert_eq!(a.trace.len(), 5);
        assert_eq!(a.trace.iter().map(|t| t.hybrids_added).sum::<usize>(), train.len());
        let b = run(&train, &config, &quick_mlp()).unwrap();
        assert_eq!(a.augmented, b.augmented);
        assert_eq!(a.model, b.model);
        let prefix = a.augmented.select(&(0..24).collect::<Vec<_>>());
        assert!(prefix.rows().eq(train.rows()));
        assert_eq!(prefix.labels(), train.labels());
    }

    #[test]
    fn single_iteration_ablation() {
        let train = toy();
        let config = MixConfig {
            iterations: 1,
            strategy: SelectionStrategy::EntropyWeighted,
            ..MixConfig::default()
        };
        let out = run(&train, &config, &quick_mlp()).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.trace[0].hybrids_added, train.len());
    }

    #[test]
    fn lambda_one_copies_majority_rows() {
        let train = toy();
        let config = MixConfig {
            lambda_dist: LambdaDist::Fixed(1.0),
            total_synthetic: Some(30),
            ..MixConfig::default()
        };
        let out = run(&train, &config, &quick_mlp()).unwrap();
        for i in train.len()..out.augmented.len() {
            assert_eq!(out.augmented.label(i), &[1.0, 0.0]);
            let row = out.augmented.row(i);
            assert!((0..20).any(|j| train.row(j) == row));
        }
    }

    #[test]
    fn rejects_invalid_input() {
        let train = toy();
        let bad = MixConfig {
            iterations: 0,
            ..MixConfig::default()
        };
        assert!(run(&train, &bad, &quick_mlp()).is_err());
        let bad = MixConfig {
            alpha: 0.0,
            ..MixConfig::default()
        };
        assert!(run(&train, &bad, &quick_mlp()).is_err());
        let majority_only = train.select(&(0..20).collect::<Vec<_>>());
        assert!(matches!(
            run(&majority_only, &MixConfig::default(), &quick_mlp()),
            Err(Error::InsufficientClass { class: MINORITY, .. })
        ));
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let trace = vec![IterationTrace {
            iteration: 1,
            hybrids_added: 3,
            train_loss: 0.5,
            mean_entropy_majority: 0.1,
            mean_entropy_minority: 0.2,
        }];
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "iteration,hybrids_added,train_loss,mean_entropy_majority,mean_entropy_minority\n1,3,0.5,0.1,0.2\n"
        );
    }
}
