pub mod baselines;
pub mod classifier;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod mixboost;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
