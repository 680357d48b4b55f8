//! Entropy ratios of a trained model and how often each training row is
//! picked by uniform and entropy-weighted selection.

use mixboost::classifier::{Mlp, MlpConfig};
use mixboost::dataset::Dataset;
use mixboost::mixboost::{r_select_pair, ClassRows, EntropyTable, EwSelector};
use mixboost::rng::seeded;

fn main() -> mixboost::Result<()> {
    // Ten majority rows along a line, three minority rows near its end.
    let mut rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 10.0, 0.2]).collect();
    rows.extend([vec![0.8, 0.3], vec![0.9, 0.35], vec![1.0, 0.4]]);
    let classes: Vec<usize> = (0..13).map(|i| usize::from(i >= 10)).collect();
    let train = Dataset::from_classes(rows, &classes)?;

    let config = MlpConfig {
        learning_rate: 1e-2,
        epochs: 100,
        ..MlpConfig::default()
    };
    let (model, _) = Mlp::fit(&config, &train)?;
    let table = EntropyTable::compute(&model, &train)?;
    let marginals = table.low_high_marginals();

    let draws = 50_000;
    let mut rng = seeded(1);
    let class_rows = ClassRows::of(&train)?;
    let selector = EwSelector::new(&table)?;
    let mut r_counts = vec![0usize; train.len()];
    let mut ew_counts = vec![0usize; train.len()];
    for _ in 0..draws {
        let r = r_select_pair(&class_rows, &mut rng)?;
        r_counts[r.majority] += 1;
        r_counts[r.minority] += 1;
        let e = selector.select(&mut rng);
        ew_counts[e.majority] += 1;
        ew_counts[e.minority] += 1;
    }

    println!("row class entropy  ratio  EW-analytic  R-freq  EW-freq");
    for (class, (idx, ent, ratio, analytic)) in [
        (0, (&class_rows.majority, table.entropies(0), table.ratios(0), &marginals.majority)),
        (1, (&class_rows.minority, table.entropies(1), table.ratios(1), &marginals.minority)),
    ] {
        for (j, &row) in idx.iter().enumerate() {
            println!(
                "{row:>3} {class:>5} {:>7.4} {:>6.3} {:>12.3} {:>7.3} {:>8.3}",
                ent[j],
                ratio[j],
                analytic[j],
                r_counts[row] as f64 / draws as f64,
                ew_counts[row] as f64 / draws as f64
            );
        }
    }
    Ok(())
}
