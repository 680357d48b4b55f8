use rand::seq::index;

use super::Mlp;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheckOptions {
    /// Central-difference step.
    pub step: f64,
    /// Number of parameters to probe; all of them when larger than the
    /// parameter count.
    pub max_params: usize,
    pub seed: u64,
}

impl Default for GradientCheckOptions {
    fn default() -> Self {
        Self {
            step: 1e-5,
            max_params: 128,
            seed: 0,
        }
    }
}

/// Largest relative error between the backpropagated gradient and central
/// finite differences of the mean batch loss.
///
/// Relative error is `|a - n| / max(|a|, |n|, 1e-8)`; the floor keeps
/// parameters with vanishing gradient (dead ReLU units) from dividing by
/// zero.
pub fn gradient_check(model: &Mlp, batch: &Dataset, options: &GradientCheckOptions) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::Empty("gradient check needs a nonempty batch".into()));
    }
    let rows: Vec<usize> = (0..batch.len()).collect();
    let (_, analytic) = model.loss_and_gradient(batch, &rows);
    let n_params = analytic.len();
    let probe: Vec<usize> = if options.max_params >= n_params {
        (0..n_params).collect()
    } else {
        let mut rng = rng::seeded(options.seed);
        index::sample(&mut rng, n_params, options.max_params).into_vec()
    };

    let mut probe_model = model.clone();
    let mut worst: f64 = 0.0;
    for p in probe {
        let original = probe_model.params()[p];
        probe_model.params_mut()[p] = original + options.step;
        let plus = probe_model.loss(batch, &rows);
        probe_model.params_mut()[p] = original - options.step;
        let minus = probe_model.loss(batch, &rows);
        probe_model.params_mut()[p] = original;

        let numeric = (plus - minus) / (2.0 * options.step);
        let a = analytic[p];
        let denom = a.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((a - numeric).abs() / denom);
    }
    Ok(worst)
}
