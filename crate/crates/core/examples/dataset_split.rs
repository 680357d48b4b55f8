//! Load a CSV, split it in stratified halves, shrink the training minority
//! class and min-max normalize.

use std::path::PathBuf;

use mixboost::dataset::{downsample_minority, load_csv, split, CsvOptions, ImbalanceSpec, Normalizer, SplitSpec};

fn main() -> mixboost::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/pima_indians_diabetes.csv");
    let data = load_csv(&path, &CsvOptions::default())?;
    let names = data.class_names().cloned().unwrap_or_default();
    println!(
        "{} rows, {} features: {} {:?} / {} {:?}",
        data.len(),
        data.n_features(),
        data.majority_count(),
        names[0],
        data.minority_count(),
        names[1]
    );

    let (train, test) = split(&data, &SplitSpec::half(42))?;
    println!("train {} ({} minority), test {} ({} minority)", train.len(), train.minority_count(), test.len(), test.minority_count());

    let train = downsample_minority(&train, &ImbalanceSpec { minority_count: 4, seed: 42 })?;
    println!("after down-sampling: {} majority, {} minority", train.majority_count(), train.minority_count());

    let norm = Normalizer::fit(&train)?;
    let train = norm.apply(&train)?;
    let test = norm.apply(&test)?;
    let top = train.rows().flatten().fold(0.0f64, |a, &b| a.max(b));
    println!("largest normalized training value {top}");
    let outside = test.rows().flatten().filter(|v| !(0.0..=1.0).contains(*v)).count();
    println!("normalized; {outside} test values fall outside [0, 1] (no clipping)");
    Ok(())
}
