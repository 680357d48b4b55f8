//! Train the MLP on a soft-labelled toy set, verify its gradients and dump
//! the weights.

use mixboost::classifier::{gradient_check, GradientCheckOptions, Mlp, MlpConfig, ProbabilisticClassifier};
use mixboost::dataset::Dataset;

fn main() -> mixboost::Result<()> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..40 {
        let t = i as f64 / 40.0;
        rows.push(vec![t, 1.0 - t]);
        // Minority probability rises with t.
        labels.push([1.0 - t, t]);
    }
    let data = Dataset::new(rows, labels)?;

    let config = MlpConfig {
        learning_rate: 1e-2,
        batch_size: 16,
        epochs: 200,
        seed: 3,
        ..MlpConfig::default()
    };
    let fresh = Mlp::new(data.n_features(), &config.hidden_layers, config.seed);
    let err = gradient_check(&fresh, &data.select(&[0, 5, 10, 15, 20, 25, 30, 35]), &GradientCheckOptions::default())?;
    println!("gradient check on the fresh network: max relative error {err:.2e}");

    let (model, report) = Mlp::fit(&config, &data)?;
    println!("loss {:.4} -> {:.4}", report.initial_loss(), report.final_loss());
    for x in [[0.1, 0.9], [0.5, 0.5], [0.9, 0.1]] {
        let p = model.predict_proba(&x);
        println!("x = {x:?}: p = [{:.3}, {:.3}]", p[0], p[1]);
    }

    let mut dump = Vec::new();
    model.dump(&mut dump).map_err(|e| mixboost::Error::InvalidConfig(e.to_string()))?;
    let text = String::from_utf8_lossy(&dump);
    println!("weight dump starts with: {}", text.lines().next().unwrap_or(""));
    Ok(())
}
