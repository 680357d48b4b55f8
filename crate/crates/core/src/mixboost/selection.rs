//! Candidate selection (the Boost step).

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::entropy::{ClassRows, EntropyTable};
use crate::dataset::{MAJORITY, MINORITY};
use crate::error::{Error, Result};

/// Row indices (into the original training set) of a selected pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CandidatePair {
    pub majority: usize,
    pub minority: usize,
}

/// Uniform, independent draw of one majority and one minority row.
pub fn r_select_pair<R: Rng + ?Sized>(rows: &ClassRows, rng: &mut R) -> Result<CandidatePair> {
    if rows.majority.is_empty() || rows.minority.is_empty() {
        return Err(Error::InsufficientClass {
            class: if rows.majority.is_empty() { MAJORITY } else { MINORITY },
            available: 0,
            required: 1,
        });
    }
    Ok(CandidatePair {
        majority: rows.majority[rng.random_range(0..rows.majority.len())],
        minority: rows.minority[rng.random_range(0..rows.minority.len())],
    })
}

/// Low-high entropy-weighted sampler built once per table.
///
/// Each draw flips a fair coin: on heads the majority row comes from the
/// high-entropy weights and the minority row from the low-entropy weights,
/// on tails the roles swap.
#[derive(Debug, Clone)]
pub struct EwSelector {
    rows: ClassRows,
    high: [WeightedIndex<f64>; 2],
    low: [WeightedIndex<f64>; 2],
}

fn weighted(weights: Vec<f64>) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(weights).map_err(|e| Error::InvalidConfig(format!("selection weights: {e}")))
}

impl EwSelector {
    pub fn new(table: &EntropyTable) -> Result<Self> {
        Ok(Self {
            rows: table.rows().clone(),
            high: [
                weighted(table.high_weights(MAJORITY))?,
                weighted(table.high_weights(MINORITY))?,
            ],
            low: [
                weighted(table.low_weights(MAJORITY))?,
                weighted(table.low_weights(MINORITY))?,
            ],
        })
    }

    pub fn select<R: Rng + ?Sized>(&self, rng: &mut R) -> CandidatePair {
        let majority_high = rng.random_bool(0.5);
        let (maj, min) = if majority_high {
            (&self.high[MAJORITY], &self.low[MINORITY])
        } else {
            (&self.low[MAJORITY], &self.high[MINORITY])
        };
        CandidatePair {
            majority: self.rows.majority[maj.sample(rng)],
            minority: self.rows.minority[min.sample(rng)],
        }
    }
}

/// Single low-high draw; build an [`EwSelector`] when drawing repeatedly.
pub fn ew_select_pair<R: Rng + ?Sized>(table: &EntropyTable, rng: &mut R) -> Result<CandidatePair> {
    Ok(EwSelector::new(table)?.select(rng))
}
