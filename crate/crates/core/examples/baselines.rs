//! Every classical resampler on a small imbalanced toy set.

use mixboost::baselines::{danger_set, resample, tomek_links, BaselineMethod, BaselineSpec};
use mixboost::dataset::Dataset;
use mixboost::rng::seeded;
use rand::Rng;

fn main() -> mixboost::Result<()> {
    let mut rng = seeded(8);
    let mut rows = Vec::new();
    let mut classes = Vec::new();
    for _ in 0..40 {
        rows.push(vec![rng.random_range(0.0..1.0), rng.random_range(0.0..0.6)]);
        classes.push(0);
    }
    for _ in 0..6 {
        rows.push(vec![rng.random_range(0.3..1.0), rng.random_range(0.45..0.75)]);
        classes.push(1);
    }
    let train = Dataset::from_classes(rows, &classes)?;
    println!("input: {} majority, {} minority", train.majority_count(), train.minority_count());
    let danger: Vec<usize> = danger_set(&train, 5)?.iter().map(|p| 40 + p).collect();
    println!("DANGER minority rows (m = 5): {danger:?}");
    println!("Tomek links: {:?}", tomek_links(&train));

    // 34 rows added, or for RUS 34 majority rows removed: either way balanced.
    for method in BaselineMethod::ALL {
        let out = resample(&train, &BaselineSpec::new(method, 34, 1))?;
        println!(
            "{method:?}: {} majority, {} minority{}",
            out.data.majority_count(),
            out.data.minority_count(),
            if out.warnings.is_empty() { String::new() } else { format!(" ({})", out.warnings.join("; ")) }
        );
    }
    Ok(())
}
