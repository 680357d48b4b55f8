//! Hybrid generation (the Mix step).

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::selection::CandidatePair;
use super::{LabelMode, LambdaDist};
use crate::dataset::Label;
use crate::error::{Error, Result};

/// A synthetic instance interpolating one majority and one minority row.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridInstance {
    pub features: Vec<f64>,
    pub label: Label,
    /// Weight on the majority instance.
    pub lambda: f64,
    /// Source rows, when the pair came from a training set.
    pub sources: Option<CandidatePair>,
}

/// `lambda * x0 + (1 - lambda) * x1`, labelled `[lambda, 1 - lambda]` in soft
/// mode or with the class of the dominant endpoint in one-hot mode (ties go
/// to the minority).
pub fn mix_pair(x0: &[f64], x1: &[f64], lambda: f64, mode: LabelMode) -> Result<HybridInstance> {
    if x0.len() != x1.len() {
        return Err(Error::DimensionMismatch {
            expected: x0.len(),
            got: x1.len(),
        });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidConfig(format!("lambda {lambda} outside [0, 1]")));
    }
    let features = if lambda == 1.0 {
        x0.to_vec()
    } else if lambda == 0.0 {
        x1.to_vec()
    } else {
        x0.iter()
            .zip(x1)
            .map(|(&a, &b)| {
                // Clamp away rounding so the result stays on the segment.
                (lambda * a + (1.0 - lambda) * b).clamp(a.min(b), a.max(b))
            })
            .collect()
    };
    let label = match mode {
        LabelMode::Soft => [lambda, 1.0 - lambda],
        LabelMode::OneHot if lambda > 0.5 => [1.0, 0.0],
        LabelMode::OneHot => [0.0, 1.0],
    };
    Ok(HybridInstance {
        features,
        label,
        lambda,
        sources: None,
    })
}

/// Draws an interpolation ratio. Beta(a, a) uses the two-Gamma
/// construction `g0 / (g0 + g1)`.
pub fn sample_lambda<R: Rng + ?Sized>(dist: LambdaDist, alpha: f64, rng: &mut R) -> Result<f64> {
    match dist {
        LambdaDist::Beta => {
            let gamma = Gamma::new(alpha, 1.0)
                .map_err(|e| Error::InvalidConfig(format!("beta shape {alpha}: {e}")))?;
            loop {
                let g0: f64 = gamma.sample(rng);
                let g1: f64 = gamma.sample(rng);
                let total = g0 + g1;
                // Both draws can underflow to zero for tiny shapes.
                if total > 0.0 {
                    return Ok(g0 / total);
                }
            }
        }
        LambdaDist::Uniform => Ok(rng.random::<f64>()),
        LambdaDist::Fixed(v) if (0.0..=1.0).contains(&v) => Ok(v),
        LambdaDist::Fixed(v) => Err(Error::InvalidConfig(format!("fixed lambda {v} outside [0, 1]"))),
    }
}
