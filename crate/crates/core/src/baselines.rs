//! Classical resampling baselines: random over/under-sampling, SMOTE,
//! Borderline-SMOTE (B1, B2), ADASYN and SMOTE followed by Tomek-link
//! removal.
//!
//! Distances are Euclidean on whatever features are passed in (normalized
//! features in the experiment pipeline). With very few minority rows the
//! neighbour count is clamped to `n1 - 1`.

use rand::seq::index;
use rand::Rng;

use crate::classifier::knn::nearest;
use crate::dataset::{hard_class, one_hot, Dataset, MAJORITY, MINORITY};
use crate::error::{Error, Result};
use crate::rng::{self, Rng as StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineMethod {
    Ros,
    Rus,
    Smote,
    BorderlineSmote1,
    BorderlineSmote2,
    Adasyn,
    SmoteTomek,
}

impl BaselineMethod {
    pub const ALL: [BaselineMethod; 7] = [
        BaselineMethod::Ros,
        BaselineMethod::Rus,
        BaselineMethod::Smote,
        BaselineMethod::BorderlineSmote1,
        BaselineMethod::BorderlineSmote2,
        BaselineMethod::Adasyn,
        BaselineMethod::SmoteTomek,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BorderlineVariant {
    B1,
    B2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineSpec {
    pub method: BaselineMethod,
    pub k_neighbors: usize,
    /// Rows to add for oversamplers, majority rows to remove for RUS.
    pub target_count: usize,
    pub seed: u64,
}

impl BaselineSpec {
    pub fn new(method: BaselineMethod, target_count: usize, seed: u64) -> Self {
        Self {
            method,
            k_neighbors: 5,
            target_count,
            seed,
        }
    }
}

/// Resampled dataset plus any fallback notices.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub data: Dataset,
    pub warnings: Vec<String>,
}

impl Resampled {
    fn clean(data: Dataset) -> Self {
        Self {
            data,
            warnings: Vec::new(),
        }
    }
}

pub fn resample(train: &Dataset, spec: &BaselineSpec) -> Result<Resampled> {
    match spec.method {
        BaselineMethod::Ros => ros(train, spec).map(Resampled::clean),
        BaselineMethod::Rus => rus(train, spec).map(Resampled::clean),
        BaselineMethod::Smote => smote(train, spec).map(Resampled::clean),
        BaselineMethod::BorderlineSmote1 => borderline_smote(train, spec, BorderlineVariant::B1),
        BaselineMethod::BorderlineSmote2 => borderline_smote(train, spec, BorderlineVariant::B2),
        BaselineMethod::Adasyn => adasyn(train, spec),
        BaselineMethod::SmoteTomek => smote_tomek(train, spec),
    }
}

struct Classes {
    majority: Vec<usize>,
    minority: Vec<usize>,
}

fn classes(train: &Dataset) -> Result<Classes> {
    if !train.all_one_hot() {
        return Err(Error::InvalidConfig("baselines require one-hot labels".into()));
    }
    let c = Classes {
        majority: train.class_indices(MAJORITY),
        minority: train.class_indices(MINORITY),
    };
    for (class, rows) in [(MAJORITY, &c.majority), (MINORITY, &c.minority)] {
        if rows.is_empty() {
            return Err(Error::InsufficientClass {
                class,
                available: 0,
                required: 1,
            });
        }
    }
    Ok(c)
}

/// Random oversampling: appends `target_count` copies of minority rows
/// drawn uniformly with replacement.
pub fn ros(train: &Dataset, spec: &BaselineSpec) -> Result<Dataset> {
    let c = classes(train)?;
    let mut rng = rng::seeded(spec.seed);
    let mut out = train.clone();
    for _ in 0..spec.target_count {
        let i = c.minority[rng.random_range(0..c.minority.len())];
        out.push(train.row(i), one_hot(MINORITY))?;
    }
    Ok(out)
}

/// Random undersampling: removes `target_count` majority rows uniformly
/// without replacement.
pub fn rus(train: &Dataset, spec: &BaselineSpec) -> Result<Dataset> {
    let c = classes(train)?;
    if spec.target_count >= c.majority.len() {
        return Err(Error::InsufficientClass {
            class: MAJORITY,
            available: c.majority.len(),
            required: spec.target_count + 1,
        });
    }
    let mut rng = rng::seeded(spec.seed);
    let mut keep = vec![true; train.len()];
    for pick in index::sample(&mut rng, c.majority.len(), spec.target_count) {
        keep[c.majority[pick]] = false;
    }
    let rows: Vec<usize> = (0..train.len()).filter(|&i| keep[i]).collect();
    Ok(train.select(&rows))
}

fn without(rows: &[usize], skip: usize) -> Vec<usize> {
    rows.iter().copied().filter(|&r| r != skip).collect()
}

/// `k` nearest minority neighbours of each minority row, clamped to
/// `n1 - 1`.
fn minority_neighbours(train: &Dataset, minority: &[usize], k: usize) -> Result<Vec<Vec<usize>>> {
    if minority.len() < 2 {
        return Err(Error::InsufficientClass {
            class: MINORITY,
            available: minority.len(),
            required: 2,
        });
    }
    let k = k.clamp(1, minority.len() - 1);
    Ok(minority
        .iter()
        .map(|&i| nearest(train, &without(minority, i), train.row(i), k))
        .collect())
}

fn interpolate(x: &[f64], y: &[f64], gap: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + gap * (b - a)).collect()
}

fn check_k(spec: &BaselineSpec) -> Result<()> {
    if spec.k_neighbors == 0 {
        return Err(Error::InvalidConfig("k_neighbors must be at least 1".into()));
    }
    Ok(())
}

/// Generates `count` SMOTE samples from the given seed positions (indices
/// into `minority`).
fn smote_from_seeds(
    train: &Dataset,
    minority: &[usize],
    seeds: &[usize],
    count_per_seed: &dyn Fn(usize, &mut StreamRng) -> usize,
    k: usize,
    rng: &mut StreamRng,
    out: &mut Dataset,
) -> Result<()> {
    let neighbours = minority_neighbours(train, minority, k)?;
    for (slot, &s) in seeds.iter().enumerate() {
        let n = count_per_seed(slot, rng);
        for _ in 0..n {
            let nn = &neighbours[s];
            let other = nn[rng.random_range(0..nn.len())];
            let gap: f64 = rng.random();
            let x = train.row(minority[s]);
            out.push(&interpolate(x, train.row(other), gap), one_hot(MINORITY))?;
        }
    }
    Ok(())
}

/// SMOTE: each synthetic row interpolates a uniformly chosen minority row
/// towards one of its `k` nearest minority neighbours.
pub fn smote(train: &Dataset, spec: &BaselineSpec) -> Result<Dataset> {
    check_k(spec)?;
    let c = classes(train)?;
    if spec.target_count == 0 {
        return Ok(train.clone());
    }
    let mut rng = rng::seeded(spec.seed);
    let seeds: Vec<usize> = (0..spec.target_count)
        .map(|_| rng.random_range(0..c.minority.len()))
        .collect();
    let mut out = train.clone();
    smote_from_seeds(train, &c.minority, &seeds, &|_, _| 1, spec.k_neighbors, &mut rng, &mut out)?;
    Ok(out)
}

/// Minority rows whose `m` nearest neighbours (any class) are at least
/// half, but not all, majority rows. Returns positions within the
/// minority row list.
pub fn danger_set(train: &Dataset, m: usize) -> Result<Vec<usize>> {
    let c = classes(train)?;
    Ok(danger_positions(train, &c, m))
}

fn danger_positions(train: &Dataset, c: &Classes, m: usize) -> Vec<usize> {
    let all: Vec<usize> = (0..train.len()).collect();
    let m = m.clamp(1, train.len() - 1);
    c.minority
        .iter()
        .enumerate()
        .filter(|(_, &i)| {
            let nn = nearest(train, &without(&all, i), train.row(i), m);
            let majority = nn
                .iter()
                .filter(|&&j| hard_class(train.label(j)) == Some(MAJORITY))
                .count();
            2 * majority >= m && majority < m
        })
        .map(|(pos, _)| pos)
        .collect()
}

/// Borderline-SMOTE: SMOTE seeded only from the DANGER set. B1
/// interpolates towards minority neighbours; B2 also towards majority
/// neighbours with the gap limited to `[0, 0.5)`. An empty DANGER set
/// falls back to plain SMOTE.
pub fn borderline_smote(train: &Dataset, spec: &BaselineSpec, variant: BorderlineVariant) -> Result<Resampled> {
    check_k(spec)?;
    let c = classes(train)?;
    if spec.target_count == 0 {
        return Ok(Resampled::clean(train.clone()));
    }
    let danger = danger_positions(train, &c, spec.k_neighbors);
    if danger.is_empty() {
        let mut r = Resampled::clean(smote(train, spec)?);
        r.warnings
            .push("borderline-SMOTE: DANGER set is empty; fell back to SMOTE".into());
        return Ok(r);
    }
    let mut rng = rng::seeded(spec.seed);
    let seeds: Vec<usize> = (0..spec.target_count)
        .map(|_| danger[rng.random_range(0..danger.len())])
        .collect();
    let mut out = train.clone();
    match variant {
        BorderlineVariant::B1 => {
            smote_from_seeds(train, &c.minority, &seeds, &|_, _| 1, spec.k_neighbors, &mut rng, &mut out)?;
        }
        BorderlineVariant::B2 => {
            let all: Vec<usize> = (0..train.len()).collect();
            let k = spec.k_neighbors.clamp(1, train.len() - 1);
            for &s in &seeds {
                let i = c.minority[s];
                let nn = nearest(train, &without(&all, i), train.row(i), k);
                let other = nn[rng.random_range(0..nn.len())];
                let limit = if hard_class(train.label(other)) == Some(MINORITY) { 1.0 } else { 0.5 };
                let gap = rng.random::<f64>() * limit;
                out.push(&interpolate(train.row(i), train.row(other), gap), one_hot(MINORITY))?;
            }
        }
    }
    Ok(Resampled { data: out, warnings: Vec::new() })
}

/// ADASYN density weights: the majority fraction among each minority row's
/// `k` nearest neighbours, normalised to sum to 1. `None` when every
/// fraction is zero.
pub fn adasyn_weights(train: &Dataset, k: usize) -> Result<Option<Vec<f64>>> {
    let c = classes(train)?;
    let all: Vec<usize> = (0..train.len()).collect();
    let k = k.clamp(1, train.len() - 1);
    let ratios: Vec<f64> = c
        .minority
        .iter()
        .map(|&i| {
            let nn = nearest(train, &without(&all, i), train.row(i), k);
            let majority = nn
                .iter()
                .filter(|&&j| hard_class(train.label(j)) == Some(MAJORITY))
                .count();
            majority as f64 / k as f64
        })
        .collect();
    let total: f64 = ratios.iter().sum();
    if total == 0.0 {
        return Ok(None);
    }
    Ok(Some(ratios.into_iter().map(|r| r / total).collect()))
}

/// Integer counts proportional to `weights` summing exactly to `total`
/// (largest remainder, earlier index first on ties).
fn apportion(weights: &[f64], total: usize) -> Vec<usize> {
    let raw: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = raw[a] - raw[a].floor();
        let rb = raw[b] - raw[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// ADASYN: allocates synthetic rows to minority seeds in proportion to
/// the local majority density, then interpolates as SMOTE does.
pub fn adasyn(train: &Dataset, spec: &BaselineSpec) -> Result<Resampled> {
    check_k(spec)?;
    let c = classes(train)?;
    if spec.target_count == 0 {
        return Ok(Resampled::clean(train.clone()));
    }
    let Some(weights) = adasyn_weights(train, spec.k_neighbors)? else {
        let mut r = Resampled::clean(smote(train, spec)?);
        r.warnings
            .push("ADASYN: no minority row has majority neighbours; fell back to SMOTE".into());
        return Ok(r);
    };
    let counts = apportion(&weights, spec.target_count);
    let seeds: Vec<usize> = (0..c.minority.len()).collect();
    let mut rng = rng::seeded(spec.seed);
    let mut out = train.clone();
    smote_from_seeds(
        train,
        &c.minority,
        &seeds,
        &|slot, _| counts[slot],
        spec.k_neighbors,
        &mut rng,
        &mut out,
    )?;
    Ok(Resampled { data: out, warnings: Vec::new() })
}

/// Pairs of opposite-class rows that are each other's nearest neighbour.
pub fn tomek_links(data: &Dataset) -> Vec<(usize, usize)> {
    if data.len() < 2 {
        return Vec::new();
    }
    let all: Vec<usize> = (0..data.len()).collect();
    let nn: Vec<usize> = (0..data.len())
        .map(|i| nearest(data, &without(&all, i), data.row(i), 1)[0])
        .collect();
    (0..data.len())
        .filter_map(|a| {
            let b = nn[a];
            let opposite = hard_class(data.label(a)) != hard_class(data.label(b));
            (a < b && nn[b] == a && opposite).then_some((a, b))
        })
        .collect()
}

/// SMOTE followed by removal of both members of every Tomek link.
pub fn smote_tomek(train: &Dataset, spec: &BaselineSpec) -> Result<Resampled> {
    let oversampled = smote(train, spec)?;
    if spec.target_count == 0 {
        return Ok(Resampled::clean(oversampled));
    }
    let mut keep = vec![true; oversampled.len()];
    for (a, b) in tomek_links(&oversampled) {
        keep[a] = false;
        keep[b] = false;
    }
    let rows: Vec<usize> = (0..oversampled.len()).filter(|&i| keep[i]).collect();
    let data = oversampled.select(&rows);
    if data.minority_count() == 0 || data.majority_count() == 0 {
        return Err(Error::InvalidConfig("Tomek-link removal emptied a class".into()));
    }
    Ok(Resampled::clean(data))
}
