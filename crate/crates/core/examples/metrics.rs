//! Confusion counts, g-mean, ROC-AUC and run summaries.

use mixboost::dataset::{one_hot, Label};
use mixboost::metrics::{confusion, gmean, gmean_from_rates, roc_auc, summarize};

fn main() -> mixboost::Result<()> {
    let labels: Vec<Label> = [0, 0, 0, 0, 0, 0, 1, 1, 1].iter().map(|&c| one_hot(c)).collect();
    let scores = [0.05, 0.2, 0.3, 0.55, 0.1, 0.4, 0.7, 0.45, 0.9];

    let c = confusion(&scores, &labels, 0.5)?;
    println!("{c:?}");
    println!(
        "TPR (majority) {:.3}, TNR (minority) {:.3}, g-mean {:.3}",
        c.tpr().unwrap_or(f64::NAN),
        c.tnr().unwrap_or(f64::NAN),
        gmean(&c)?
    );
    println!("ROC-AUC {:.4}", roc_auc(&scores, &labels)?);
    println!("gmean(0.81, 0.49) = {}", gmean_from_rates(0.81, 0.49));

    let s = summarize(&[0.61, 0.58, 0.66, 0.7, 0.52])?;
    println!("runs: mean {:.3}, population std {:.3}, range [{}, {}]", s.mean, s.std, s.min, s.max);
    Ok(())
}
