use crate::classifier::ProbabilisticClassifier;
use crate::dataset::{hard_class, Dataset, Label, MAJORITY, MINORITY};
use crate::error::{Error, Result};

/// Offset that keeps the lowest-ratio instance selectable on the low side.
pub const LOW_SIDE_EPSILON: f64 = 1e-9;

/// Shannon entropy in nats with `0 * ln 0 = 0`.
pub fn entropy(p: &[f64]) -> f64 {
    // Subtracting from +0 keeps certain predictions at +0 rather than -0.
    0.0 - p
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum::<f64>()
}

/// Row indices of the one-hot majority and minority instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRows {
    pub majority: Vec<usize>,
    pub minority: Vec<usize>,
}

impl ClassRows {
    /// Candidate rows of an original (non-augmented) training set.
    pub fn of(train: &Dataset) -> Result<Self> {
        if !train.all_one_hot() {
            return Err(Error::InvalidConfig(
                "selection candidates must carry one-hot labels".into(),
            ));
        }
        let rows = Self {
            majority: train.class_indices(MAJORITY),
            minority: train.class_indices(MINORITY),
        };
        rows.require_both()?;
        Ok(rows)
    }

    fn require_both(&self) -> Result<()> {
        for (class, rows) in [(MAJORITY, &self.majority), (MINORITY, &self.minority)] {
            if rows.is_empty() {
                return Err(Error::InsufficientClass {
                    class,
                    available: 0,
                    required: 1,
                });
            }
        }
        Ok(())
    }

    pub fn of_class(&self, class: usize) -> &[usize] {
        if class == MAJORITY {
            &self.majority
        } else {
            &self.minority
        }
    }
}

/// Per-class selection weights, one vector per class aligned with
/// [`ClassRows`].
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionProbabilities {
    pub majority: Vec<f64>,
    pub minority: Vec<f64>,
}

impl SelectionProbabilities {
    /// Equal probability within each class: `1/n0` and `1/n1`.
    pub fn uniform(n0: usize, n1: usize) -> Self {
        Self {
            majority: vec![1.0 / n0 as f64; n0],
            minority: vec![1.0 / n1 as f64; n1],
        }
    }
}

/// Prediction entropies of the original training instances and their
/// per-class entropy ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTable {
    rows: ClassRows,
    entropies: [Vec<f64>; 2],
    sums: [f64; 2],
    ratios: [Vec<f64>; 2],
    degenerate: [bool; 2],
}

impl EntropyTable {
    pub fn compute<C: ProbabilisticClassifier + ?Sized>(model: &C, train: &Dataset) -> Result<Self> {
        let rows = ClassRows::of(train)?;
        let predictions: Vec<Label> = train.rows().map(|r| model.predict_proba(r)).collect();
        Ok(Self::build(rows, &predictions))
    }

    /// Table from precomputed predictions; `labels` must be one-hot.
    pub fn from_predictions(predictions: &[Label], labels: &[Label]) -> Result<Self> {
        if predictions.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: predictions.len(),
            });
        }
        let mut rows = ClassRows {
            majority: Vec::new(),
            minority: Vec::new(),
        };
        for (i, label) in labels.iter().enumerate() {
            match hard_class(label) {
                Some(MAJORITY) => rows.majority.push(i),
                Some(_) => rows.minority.push(i),
                None => {
                    return Err(Error::InvalidConfig(
                        "entropy table needs one-hot ground truth".into(),
                    ))
                }
            }
        }
        rows.require_both()?;
        Ok(Self::build(rows, predictions))
    }

    fn build(rows: ClassRows, predictions: &[Label]) -> Self {
        let mut entropies: [Vec<f64>; 2] = Default::default();
        let mut sums = [0.0; 2];
        let mut ratios: [Vec<f64>; 2] = Default::default();
        let mut degenerate = [false; 2];
        for class in [MAJORITY, MINORITY] {
            let e: Vec<f64> = rows
                .of_class(class)
                .iter()
                .map(|&i| entropy(&predictions[i]))
                .collect();
            let sum: f64 = e.iter().sum();
            ratios[class] = if sum > 0.0 {
                e.iter().map(|v| v / sum).collect()
            } else {
                degenerate[class] = true;
                vec![1.0 / e.len() as f64; e.len()]
            };
            sums[class] = sum;
            entropies[class] = e;
        }
        Self {
            rows,
            entropies,
            sums,
            ratios,
            degenerate,
        }
    }

    pub fn rows(&self) -> &ClassRows {
        &self.rows
    }

    pub fn entropies(&self, class: usize) -> &[f64] {
        &self.entropies[class]
    }

    /// Total entropy of a class.
    pub fn class_sum(&self, class: usize) -> f64 {
        self.sums[class]
    }

    pub fn mean_entropy(&self, class: usize) -> f64 {
        self.sums[class] / self.entropies[class].len() as f64
    }

    /// Entropy ratios of a class; uniform when the class is degenerate.
    pub fn ratios(&self, class: usize) -> &[f64] {
        &self.ratios[class]
    }

    /// Every instance of the class has zero entropy, so its ratios fell back
    /// to uniform.
    pub fn is_degenerate(&self, class: usize) -> bool {
        self.degenerate[class]
    }

    /// Weights favouring high entropy: the entropy ratios themselves.
    pub fn high_weights(&self, class: usize) -> Vec<f64> {
        self.ratios[class].clone()
    }

    /// Weights favouring low entropy: `(max_r - r + eps)` normalised.
    pub fn low_weights(&self, class: usize) -> Vec<f64> {
        let r = &self.ratios[class];
        let max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = r.iter().map(|v| max - v + LOW_SIDE_EPSILON).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    }

    /// Marginal selection probabilities of low-high selection: each class is
    /// drawn from its high side half the time and its low side otherwise.
    pub fn low_high_marginals(&self) -> SelectionProbabilities {
        let mix = |class| {
            self.high_weights(class)
                .iter()
                .zip(self.low_weights(class))
                .map(|(h, l)| 0.5 * h + 0.5 * l)
                .collect()
        };
        SelectionProbabilities {
            majority: mix(MAJORITY),
            minority: mix(MINORITY),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::one_hot;

    #[test]
    fn entropy_examples() {
        assert!((entropy(&[0.5, 0.5]) - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
        assert_eq!(entropy(&[0.0, 1.0]), 0.0);
    }

    #[test]
    fn ratio_normalisation() {
        // Predictions chosen so the two majority entropies are 0.2 and 0.6
        // up to scaling: find p with H(p) = 0.2 and H(q) = 0.6 numerically.
        let target = |h: f64| {
            let (mut lo, mut hi) = (1e-12, 0.5);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if entropy(&[mid, 1.0 - mid]) < h {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let p = 0.5 * (lo + hi);
            [p, 1.0 - p]
        };
        let preds = vec![target(0.2), target(0.6), [0.5, 0.5]];
        let labels = vec![one_hot(0), one_hot(0), one_hot(1)];
        let t = EntropyTable::from_predictions(&preds, &labels).unwrap();
        let r = t.ratios(MAJORITY);
        assert!((r[0] - 0.25).abs() < 1e-9);
        assert!((r[1] - 0.75).abs() < 1e-9);
        assert_eq!(t.ratios(MINORITY), &[1.0]);
    }

    #[test]
    fn degenerate_class_falls_back_to_uniform() {
        let preds = vec![[1.0, 0.0], [1.0, 0.0], [0.3, 0.7]];
        let labels = vec![one_hot(0), one_hot(0), one_hot(1)];
        let t = EntropyTable::from_predictions(&preds, &labels).unwrap();
        assert!(t.is_degenerate(MAJORITY));
        assert!(!t.is_degenerate(MINORITY));
        assert_eq!(t.ratios(MAJORITY), &[0.5, 0.5]);
        assert_eq!(t.low_weights(MAJORITY), vec![0.5, 0.5]);
    }

    #[test]
    fn low_weights_invert_ratios() {
        let preds = vec![[0.5, 0.5], [0.9, 0.1], [0.2, 0.8], [0.6, 0.4]];
        let labels = vec![one_hot(0), one_hot(0), one_hot(1), one_hot(1)];
        let t = EntropyTable::from_predictions(&preds, &labels).unwrap();
        let high = t.high_weights(MAJORITY);
        let low = t.low_weights(MAJORITY);
        assert!(high[0] > high[1]);
        assert!(low[0] < low[1]);
        assert!((low.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let m = t.low_high_marginals();
        assert!((m.majority.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((m.minority.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_class_is_an_error() {
        let preds = vec![[0.5, 0.5]];
        assert!(EntropyTable::from_predictions(&preds, &[one_hot(0)]).is_err());
        assert!(EntropyTable::from_predictions(&preds, &[[0.5, 0.5]]).is_err());
    }

    #[test]
    fn uniform_probabilities() {
        let p = SelectionProbabilities::uniform(4, 1);
        assert_eq!(p.majority, vec![0.25; 4]);
        assert_eq!(p.minority, vec![1.0]);
    }
}
