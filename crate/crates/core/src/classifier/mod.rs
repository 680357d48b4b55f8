//! Probabilistic binary classifiers.
//!
//! The multilayer perceptron is the model retrained inside the MixBoost loop;
//! it trains on soft label distributions with a cross-entropy loss. The
//! nearest-neighbour classifier is a second, training-free probability
//! source for baseline comparisons.

mod adam;
mod gradcheck;
pub(crate) mod knn;
mod mlp;

pub use adam::{AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use gradcheck::{gradient_check, GradientCheckOptions};
pub use knn::{knn_predict_proba, KnnClassifier};
pub use mlp::{FitReport, Mlp, MlpConfig};

use crate::dataset::{Dataset, Label, MINORITY};

/// A model that maps a feature vector to a distribution over
/// `[majority, minority]`.
pub trait ProbabilisticClassifier {
    fn predict_proba(&self, features: &[f64]) -> Label;

    /// Minority-class probability for every row of `data`.
    fn minority_scores(&self, data: &Dataset) -> Vec<f64> {
        data.rows().map(|r| self.predict_proba(r)[MINORITY]).collect()
    }
}

/// Softmax over two logits with max subtraction.
pub fn softmax2(logits: [f64; 2]) -> Label {
    let max = logits[0].max(logits[1]);
    let e0 = (logits[0] - max).exp();
    let e1 = (logits[1] - max).exp();
    let sum = e0 + e1;
    [e0 / sum, e1 / sum]
}
