use super::ProbabilisticClassifier;
use crate::dataset::{hard_class, Dataset, Label};
use crate::error::{Error, Result};

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the `k` rows of `data` nearest to `query`, closest first.
/// Equal distances keep the lower row index first.
pub(crate) fn nearest(data: &Dataset, candidates: &[usize], query: &[f64], k: usize) -> Vec<usize> {
    let mut dist: Vec<(f64, usize)> = candidates
        .iter()
        .map(|&i| (squared_distance(data.row(i), query), i))
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    dist.truncate(k);
    dist.into_iter().map(|(_, i)| i).collect()
}

/// Class frequencies among the `k` nearest training rows (Euclidean).
pub fn knn_predict_proba(train: &Dataset, k: usize, features: &[f64]) -> Result<Label> {
    KnnClassifier::new(train.clone(), k).map(|c| c.predict_proba(features))
}

/// k-nearest-neighbour classifier over one-hot training rows.
#[derive(Debug, Clone)]
pub struct KnnClassifier {
    train: Dataset,
    k: usize,
    all: Vec<usize>,
}

impl KnnClassifier {
    pub fn new(train: Dataset, k: usize) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Empty("k-NN needs training rows".into()));
        }
        if !train.all_one_hot() {
            return Err(Error::InvalidConfig("k-NN requires one-hot labels".into()));
        }
        if k == 0 || k > train.len() {
            return Err(Error::InvalidConfig(format!(
                "k = {k} must lie in 1..={}",
                train.len()
            )));
        }
        let all = (0..train.len()).collect();
        Ok(Self { train, k, all })
    }
}

impl ProbabilisticClassifier for KnnClassifier {
    fn predict_proba(&self, features: &[f64]) -> Label {
        let mut counts = [0.0; 2];
        for i in nearest(&self.train, &self.all, features, self.k) {
            counts[hard_class(self.train.label(i)).unwrap()] += 1.0;
        }
        [counts[0] / self.k as f64, counts[1] / self.k as f64]
    }
}
