//! Ablations on Pima at four minority rows: single iteration, uniform
//! lambda, one-hot labels, then a sweep over the synthetic count.
//!
//! cargo run --release --example ablation_sweep -- [runs]

use std::path::PathBuf;

use mixboost::classifier::MlpConfig;
use mixboost::experiment::{run_experiment, sweep, ExperimentConfig, Method, SweepAxis};
use mixboost::mixboost::{LabelMode, LambdaDist, MixConfig};

fn main() -> mixboost::Result<()> {
    let runs = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let base = ExperimentConfig {
        datasets: vec![PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/pima_indians_diabetes.csv")],
        method: Method::MixBoost,
        runs,
        mlp: MlpConfig {
            learning_rate: 1e-3,
            ..MlpConfig::default()
        },
        ..ExperimentConfig::default()
    };

    let variants = [
        ("full", MixConfig::default()),
        ("1 iteration", MixConfig { iterations: 1, ..MixConfig::default() }),
        ("uniform lambda", MixConfig { lambda_dist: LambdaDist::Uniform, ..MixConfig::default() }),
        ("one-hot labels", MixConfig { label_mode: LabelMode::OneHot, ..MixConfig::default() }),
    ];
    for (name, mix) in variants {
        let report = run_experiment(&ExperimentConfig { mix, ..base.clone() })?;
        let s = &report.summaries[0];
        println!("{name:<15} g-mean {:.3} ± {:.3}", s.gmean_mean, s.gmean_std_pop);
    }

    for row in sweep(&base, &SweepAxis::Synthetic(vec![0.5, 1.0, 2.0]))? {
        println!("n_syn = {}·n: g-mean {:.3}", row.value, row.gmean_mean);
    }
    Ok(())
}
