use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use mixboost::baselines::{resample, BaselineMethod, BaselineSpec};
use mixboost::classifier::{Mlp, MlpConfig, ProbabilisticClassifier};
use mixboost::dataset::{
    downsample_minority, one_hot, split, Dataset, ImbalanceSpec, Label, Normalizer, SplitSpec, MAJORITY, MINORITY,
};
use mixboost::metrics::{confusion, gmean, roc_auc};
use mixboost::mixboost::{
    mix_pair, r_select_pair, run, ClassRows, EntropyTable, EwSelector, LabelMode, LambdaDist, MixConfig,
};
use mixboost::rng::seeded;
use mixboost::stats::{bayesian_signed_test, Attribution, DirichletConfig};

/// Rows tagged with their original index in the first column so multisets
/// can be compared exactly.
fn tagged(n0: usize, n1: usize, noise: &[f64]) -> Dataset {
    let n = n0 + n1;
    let rows = (0..n)
        .map(|i| vec![i as f64, noise[i % noise.len()] * (i as f64 + 1.0)])
        .collect();
    let classes: Vec<usize> = (0..n).map(|i| usize::from(i >= n0)).collect();
    Dataset::from_classes(rows, &classes).unwrap()
}

fn sorted_rows(d: &Dataset) -> Vec<(Vec<u64>, [u64; 2])> {
    let mut v: Vec<_> = (0..d.len())
        .map(|i| {
            (
                d.row(i).iter().map(|x| x.to_bits()).collect(),
                d.label(i).map(f64::to_bits),
            )
        })
        .collect();
    v.sort();
    v
}

fn probabilities(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_is_a_permutation(n0 in 2usize..40, n1 in 2usize..20, seed: u64,
                              noise in prop::collection::vec(-1.0..1.0f64, 1..5)) {
        let data = tagged(n0, n1, &noise);
        let (train, test) = split(&data, &SplitSpec::half(seed)).unwrap();
        prop_assert_eq!(sorted_rows(&train.concat(&test).unwrap()), sorted_rows(&data));
    }

    #[test]
    fn downsampling_keeps_majority_and_values(n0 in 1usize..30, n1 in 1usize..20, m in 1usize..20, seed: u64) {
        prop_assume!(m <= n1);
        let data = tagged(n0, n1, &[0.5]);
        let out = downsample_minority(&data, &ImbalanceSpec { minority_count: m, seed }).unwrap();
        prop_assert_eq!(out.minority_count(), m);
        let maj: Vec<&[f64]> = out.rows().zip(out.labels()).filter(|(_, l)| l[0] == 1.0).map(|(r, _)| r).collect();
        let orig: Vec<&[f64]> = data.rows().take(n0).collect();
        prop_assert_eq!(maj, orig);
        for r in out.rows() {
            prop_assert_eq!(r, data.row(r[0] as usize));
        }
    }

    #[test]
    fn normalizer_maps_training_data_into_unit_box(
        rows in prop::collection::vec(prop::collection::vec(-1e3..1e3f64, 3), 2..30)
    ) {
        let classes: Vec<usize> = (0..rows.len()).map(|i| i % 2).collect();
        let data = Dataset::from_classes(rows, &classes).unwrap();
        let norm = Normalizer::fit(&data).unwrap().apply(&data).unwrap();
        for r in norm.rows() {
            for &v in r {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn mlp_outputs_are_distributions(seed: u64, x in prop::collection::vec(-1e4..1e4f64, 5)) {
        let model = Mlp::new(5, &[32], seed);
        let p = model.predict_proba(&x);
        prop_assert!(p[0] >= 0.0 && p[1] >= 0.0);
        prop_assert!((p[0] + p[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hybrids_are_convex(x0 in prop::collection::vec(-1e3..1e3f64, 1..8), lambda in 0.0..=1.0f64,
                          shift in -5.0..5.0f64) {
        let x1: Vec<f64> = x0.iter().enumerate().map(|(i, v)| v * 0.3 + shift * i as f64).collect();
        let h = mix_pair(&x0, &x1, lambda, LabelMode::Soft).unwrap();
        prop_assert_eq!(h.label[0], lambda);
        prop_assert!((h.label[0] + h.label[1] - 1.0).abs() < 1e-12);
        for ((v, a), b) in h.features.iter().zip(&x0).zip(&x1) {
            prop_assert!(a.min(*b) <= *v && *v <= a.max(*b));
        }
        let hard = mix_pair(&x0, &x1, lambda, LabelMode::OneHot).unwrap();
        prop_assert!(hard.label == [1.0, 0.0] || hard.label == [0.0, 1.0]);
    }

    #[test]
    fn entropy_ratios_sum_to_one(p in probabilities(24), n1 in 1usize..12) {
        let labels: Vec<Label> = (0..24).map(|i| one_hot(usize::from(i < n1))).collect();
        let preds: Vec<Label> = p.iter().map(|&v| [1.0 - v, v]).collect();
        let table = EntropyTable::from_predictions(&preds, &labels).unwrap();
        for class in [MAJORITY, MINORITY] {
            let r = table.ratios(class);
            prop_assert!(r.iter().all(|v| (0.0..=1.0).contains(v)));
            if table.class_sum(class) > 0.0 {
                prop_assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
        let m = table.low_high_marginals();
        prop_assert!((m.majority.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!((m.minority.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn auc_complement(classes in prop::collection::vec(0usize..2, 2..150), seed: u64) {
        prop_assume!(classes.contains(&0) && classes.contains(&1));
        // Distinct grid scores, so there are no ties.
        let mut grid: Vec<usize> = (0..classes.len()).collect();
        let mut rng = seeded(seed);
        rand::seq::SliceRandom::shuffle(grid.as_mut_slice(), &mut rng);
        let scores: Vec<f64> = grid.iter().map(|&g| g as f64 / 1000.0).collect();
        let flipped: Vec<f64> = scores.iter().map(|s| 1.0 - s).collect();
        let labels: Vec<Label> = classes.iter().map(|&c| one_hot(c)).collect();
        let sum = roc_auc(&scores, &labels).unwrap() + roc_auc(&flipped, &labels).unwrap();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auc_matches_brute_force(pairs in prop::collection::vec((0u8..10, 0usize..2), 2..200)) {
        let classes: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        prop_assume!(classes.contains(&0) && classes.contains(&1));
        let scores: Vec<f64> = pairs.iter().map(|p| f64::from(p.0) / 10.0).collect();
        let labels: Vec<Label> = classes.iter().map(|&c| one_hot(c)).collect();
        let (mut twice, mut total) = (0u64, 0u64);
        for i in 0..scores.len() {
            for j in 0..scores.len() {
                if classes[i] == 1 && classes[j] == 0 {
                    total += 2;
                    twice += match scores[i].partial_cmp(&scores[j]).unwrap() {
                        std::cmp::Ordering::Greater => 2,
                        std::cmp::Ordering::Equal => 1,
                        std::cmp::Ordering::Less => 0,
                    };
                }
            }
        }
        prop_assert_eq!(roc_auc(&scores, &labels).unwrap(), twice as f64 / total as f64);
    }

    #[test]
    fn gmean_is_bracketed(scores in probabilities(40), split_at in 1usize..39) {
        let labels: Vec<Label> = (0..40).map(|i| one_hot(usize::from(i >= split_at))).collect();
        let c = confusion(&scores, &labels, 0.5).unwrap();
        let (tpr, tnr) = (c.tpr().unwrap(), c.tnr().unwrap());
        let g = gmean(&c).unwrap();
        prop_assert!(tpr.min(tnr) <= g + 1e-15 && g <= tpr.max(tnr) + 1e-15);
    }

    #[test]
    fn oversamplers_keep_rows_one_hot(seed: u64, target in 0usize..30, method_idx in 0usize..7) {
        let method = BaselineMethod::ALL[method_idx];
        let mut rng = seeded(seed);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| vec![rand::Rng::random(&mut rng), rand::Rng::random(&mut rng)])
            .collect();
        let classes: Vec<usize> = (0..30).map(|i| usize::from(i >= 22)).collect();
        let data = Dataset::from_classes(rows, &classes).unwrap();
        let target = if method == BaselineMethod::Rus { target.min(21) } else { target };
        let out = resample(&data, &BaselineSpec::new(method, target, seed)).unwrap().data;
        prop_assert!(out.all_one_hot());
        if target == 0 {
            prop_assert_eq!(sorted_rows(&out), sorted_rows(&data));
        }
        let originals = sorted_rows(&data);
        let keep_class = if method == BaselineMethod::Rus { MINORITY } else { MAJORITY };
        for i in out.class_indices(keep_class) {
            let key = (out.row(i).iter().map(|x| x.to_bits()).collect::<Vec<_>>(), out.label(i).map(f64::to_bits));
            prop_assert!(originals.binary_search(&key).is_ok());
        }
        if method == BaselineMethod::Rus {
            prop_assert_eq!(out.minority_count(), 8);
        } else if method != BaselineMethod::SmoteTomek {
            prop_assert_eq!(out.majority_count(), 22);
        }
    }
}

fn signed_cfg(rope: f64, seed: u64) -> DirichletConfig {
    DirichletConfig {
        rope_width: rope,
        posterior_samples: 2000,
        seed,
        ..DirichletConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn signed_test_is_scale_invariant(d in prop::collection::vec(-0.5..0.5f64, 2..15), c in 0.01..100.0f64, seed: u64) {
        let scaled: Vec<f64> = d.iter().map(|v| v * c).collect();
        let a = bayesian_signed_test(&d, &signed_cfg(0.0, seed)).unwrap();
        let b = bayesian_signed_test(&scaled, &signed_cfg(0.0, seed)).unwrap();
        prop_assert!((a.p_left - b.p_left).abs() < 1e-12 && (a.p_right - b.p_right).abs() < 1e-12);
        prop_assert!((a.p_left + a.p_rope + a.p_right - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wider_rope_never_lowers_rope_mass(d in prop::collection::vec(-0.3..0.3f64, 2..15), seed: u64, expected: bool) {
        let attribution = if expected { Attribution::ExpectedMass } else { Attribution::MaxMass };
        let mut last = -1.0;
        for rope in [0.0, 0.01, 0.05, 0.1, 0.2, 0.4] {
            let r = bayesian_signed_test(&d, &DirichletConfig { attribution, ..signed_cfg(rope, seed) }).unwrap();
            prop_assert!(r.p_rope >= last - 1e-12);
            last = r.p_rope;
        }
    }
}

fn chi_square_p(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    1.0 - ChiSquared::new((counts.len() - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn ew_with_constant_predictions_is_uniform() {
    let (n0, n1) = (12, 5);
    let labels: Vec<Label> = (0..n0 + n1).map(|i| one_hot(usize::from(i >= n0))).collect();
    let preds = vec![[0.7, 0.3]; n0 + n1];
    let table = EntropyTable::from_predictions(&preds, &labels).unwrap();
    let selector = EwSelector::new(&table).unwrap();
    let mut rng = seeded(21);
    let (mut maj, mut min) = (vec![0; n0], vec![0; n1]);
    for _ in 0..100_000 {
        let pair = selector.select(&mut rng);
        maj[pair.majority] += 1;
        min[pair.minority - n0] += 1;
    }
    assert!(chi_square_p(&maj) > 0.01, "{maj:?}");
    assert!(chi_square_p(&min) > 0.01, "{min:?}");
}

#[test]
fn r_selection_covers_only_training_rows() {
    let data = tagged(9, 3, &[0.1]);
    let rows = ClassRows::of(&data).unwrap();
    let mut rng = seeded(4);
    for _ in 0..1000 {
        let p = r_select_pair(&rows, &mut rng).unwrap();
        assert!(p.majority < 9 && (9..12).contains(&p.minority));
    }
}

#[test]
fn lambda_one_copies_majority_rows() {
    let data = tagged(16, 4, &[0.2, -0.7]);
    let data = Normalizer::fit(&data).unwrap().apply(&data).unwrap();
    let mix = MixConfig {
        lambda_dist: LambdaDist::Fixed(1.0),
        total_synthetic: Some(20),
        seed: 5,
        ..MixConfig::default()
    };
    let mlp = MlpConfig {
        epochs: 5,
        ..MlpConfig::default()
    };
    let out = run(&data, &mix, &mlp).unwrap();
    assert_eq!(out.augmented.len(), 40);
    let majority: Vec<&[f64]> = data.rows().take(16).collect();
    for i in 20..40 {
        assert_eq!(out.augmented.label(i), &[1.0, 0.0]);
        assert!(majority.contains(&out.augmented.row(i)));
    }
}
