//! Evaluation metrics: g-mean, ROC-AUC and run aggregation.
//!
//! "Positive" is the majority class: TPR is majority recall and TNR is
//! minority recall. The g-mean is symmetric in the two, so the naming only
//! matters for reporting.

use crate::dataset::{hard_class, Label, MAJORITY, MINORITY};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    /// Majority recall; `None` without majority instances.
    pub fn tpr(&self) -> Option<f64> {
        let d = self.tp + self.fn_;
        (d > 0).then(|| self.tp as f64 / d as f64)
    }

    /// Minority recall; `None` without minority instances.
    pub fn tnr(&self) -> Option<f64> {
        let d = self.tn + self.fp;
        (d > 0).then(|| self.tn as f64 / d as f64)
    }
}

fn label_classes(labels: &[Label]) -> Result<Vec<usize>> {
    labels
        .iter()
        .map(|l| {
            hard_class(l).ok_or_else(|| Error::InvalidConfig("evaluation labels must be one-hot".into()))
        })
        .collect()
}

/// Tallies predictions, calling an instance minority when its minority
/// probability exceeds `threshold`.
pub fn confusion(minority_scores: &[f64], labels: &[Label], threshold: f64) -> Result<ConfusionCounts> {
    if minority_scores.is_empty() {
        return Err(Error::Empty("no predictions to evaluate".into()));
    }
    if minority_scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: minority_scores.len(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (&score, class) in minority_scores.iter().zip(label_classes(labels)?) {
        let predicted_minority = score > threshold;
        match (class, predicted_minority) {
            (MAJORITY, false) => c.tp += 1,
            (MAJORITY, true) => c.fn_ += 1,
            (_, true) => c.tn += 1,
            (_, false) => c.fp += 1,
        }
    }
    Ok(c)
}

/// `sqrt(TPR * TNR)`.
pub fn gmean(c: &ConfusionCounts) -> Result<f64> {
    match (c.tpr(), c.tnr()) {
        (Some(tpr), Some(tnr)) => Ok(gmean_from_rates(tpr, tnr)),
        (None, _) => Err(Error::InsufficientClass {
            class: MAJORITY,
            available: 0,
            required: 1,
        }),
        (_, None) => Err(Error::InsufficientClass {
            class: MINORITY,
            available: 0,
            required: 1,
        }),
    }
}

pub fn gmean_from_rates(tpr: f64, tnr: f64) -> f64 {
    (tpr * tnr).sqrt()
}

/// Probability that a random minority instance outscores a random majority
/// instance, ties counting one half (Mann-Whitney U / (n0 n1)).
///
/// Runs in `O(n log n)`: scores are sorted once and pair counts accumulate
/// per block of tied scores in exact integer arithmetic.
pub fn roc_auc(minority_scores: &[f64], labels: &[Label]) -> Result<f64> {
    if minority_scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: minority_scores.len(),
        });
    }
    let classes = label_classes(labels)?;
    let mut scored: Vec<(f64, usize)> = minority_scores.iter().copied().zip(classes).collect();
    if scored.iter().any(|(s, _)| s.is_nan()) {
        return Err(Error::InvalidConfig("NaN score".into()));
    }
    let n1 = scored.iter().filter(|(_, c)| *c == MINORITY).count() as u64;
    let n0 = scored.len() as u64 - n1;
    if n0 == 0 || n1 == 0 {
        return Err(Error::InsufficientClass {
            class: if n0 == 0 { MAJORITY } else { MINORITY },
            available: 0,
            required: 1,
        });
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Twice the U statistic.
    let mut twice_u: u64 = 0;
    let mut majority_below: u64 = 0;
    let mut start = 0;
    while start < scored.len() {
        let mut end = start;
        while end < scored.len() && scored[end].0 == scored[start].0 {
            end += 1;
        }
        let block = &scored[start..end];
        let minority_here = block.iter().filter(|(_, c)| *c == MINORITY).count() as u64;
        let majority_here = block.len() as u64 - minority_here;
        twice_u += 2 * minority_here * majority_below + minority_here * majority_here;
        majority_below += majority_here;
        start = end;
    }
    Ok(twice_u as f64 / (2 * n0 * n1) as f64)
}

/// Mean and population standard deviation of repeated runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub values: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(runs: &[f64]) -> Result<RunSummary> {
    if runs.is_empty() {
        return Err(Error::Empty("no runs to summarize".into()));
    }
    let n = runs.len() as f64;
    let min = runs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = runs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Ok(RunSummary {
            values: runs.to_vec(),
            mean: min,
            std: 0.0,
            min,
            max,
        });
    }
    let mean = runs.iter().sum::<f64>() / n;
    let var = runs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(RunSummary {
        values: runs.to_vec(),
        mean: mean.clamp(min, max),
        std: var.sqrt(),
        min,
        max,
    })
}
