//! Tabular binary datasets with soft labels.
//!
//! Class index 0 is the majority class and index 1 the minority class. Every
//! row carries a two-entry label distribution; rows read from disk are
//! one-hot, while hybrid rows produced by mixing carry soft labels and mark
//! the dataset as augmented.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::{index, SliceRandom};

use crate::error::{Error, Result};
use crate::rng;

pub const MAJORITY: usize = 0;
pub const MINORITY: usize = 1;

/// Probability distribution over `[majority, minority]`.
pub type Label = [f64; 2];

const LABEL_SUM_TOLERANCE: f64 = 1e-9;

pub fn one_hot(class: usize) -> Label {
    let mut label = [0.0; 2];
    label[class] = 1.0;
    label
}

/// Class index of a one-hot label, `None` for soft labels.
pub fn hard_class(label: &Label) -> Option<usize> {
    match label {
        [a, b] if *a == 1.0 && *b == 0.0 => Some(MAJORITY),
        [a, b] if *a == 0.0 && *b == 1.0 => Some(MINORITY),
        _ => None,
    }
}

fn validate_label(label: &Label) -> Result<()> {
    let ok = label.iter().all(|p| p.is_finite() && *p >= 0.0)
        && (label[0] + label[1] - 1.0).abs() <= LABEL_SUM_TOLERANCE;
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "label {label:?} is not a probability distribution"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<Label>,
    augmented: bool,
    class_names: Option<[String; 2]>,
}

impl Dataset {
    /// Builds a dataset from row-major features and label distributions.
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                got: labels.len(),
            });
        }
        let n_features = rows.first().map_or(0, Vec::len);
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for row in &rows {
            if row.len() != n_features {
                return Err(Error::DimensionMismatch {
                    expected: n_features,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig("non-finite feature value".into()));
            }
            features.extend_from_slice(row);
        }
        for label in &labels {
            validate_label(label)?;
        }
        let augmented = labels.iter().any(|l| hard_class(l).is_none());
        Ok(Self {
            features,
            n_features,
            labels,
            augmented,
            class_names: None,
        })
    }

    /// Builds a dataset with one-hot labels from class indices.
    pub fn from_classes(rows: Vec<Vec<f64>>, classes: &[usize]) -> Result<Self> {
        if let Some(bad) = classes.iter().find(|&&c| c > MINORITY) {
            return Err(Error::InvalidConfig(format!("class index {bad} is not binary")));
        }
        Self::new(rows, classes.iter().map(|&c| one_hot(c)).collect())
    }

    pub fn empty(n_features: usize) -> Self {
        Self {
            features: Vec::new(),
            n_features,
            labels: Vec::new(),
            augmented: false,
            class_names: None,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.len()).map(move |i| self.row(i))
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// True once any soft-labelled hybrid row has been appended.
    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    /// Raw label values `[majority, minority]` when loaded from a file.
    pub fn class_names(&self) -> Option<&[String; 2]> {
        self.class_names.as_ref()
    }

    pub fn with_class_names(mut self, names: [String; 2]) -> Self {
        self.class_names = Some(names);
        self
    }

    /// Row indices whose label is one-hot for `class`.
    pub fn class_indices(&self, class: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| hard_class(&self.labels[i]) == Some(class))
            .collect()
    }

    /// Number of one-hot majority rows (n0).
    pub fn majority_count(&self) -> usize {
        self.count_class(MAJORITY)
    }

    /// Number of one-hot minority rows (n1).
    pub fn minority_count(&self) -> usize {
        self.count_class(MINORITY)
    }

    fn count_class(&self, class: usize) -> usize {
        self.labels
            .iter()
            .filter(|l| hard_class(l) == Some(class))
            .count()
    }

    pub fn all_one_hot(&self) -> bool {
        self.labels.iter().all(|l| hard_class(l).is_some())
    }

    /// Minority-class probability of every label.
    pub fn minority_targets(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l[MINORITY]).collect()
    }

    pub fn push(&mut self, row: &[f64], label: Label) -> Result<()> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: row.len(),
            });
        }
        validate_label(&label)?;
        if hard_class(&label).is_none() {
            self.augmented = true;
        }
        self.features.extend_from_slice(row);
        self.labels.push(label);
        Ok(())
    }

    /// Marks the dataset as containing generated rows regardless of labels.
    pub fn mark_augmented(&mut self) {
        self.augmented = true;
    }

    /// New dataset holding the given rows in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self {
            features,
            n_features: self.n_features,
            labels,
            augmented: self.augmented,
            class_names: self.class_names.clone(),
        }
    }

    pub fn concat(&self, other: &Dataset) -> Result<Self> {
        if other.n_features != self.n_features && !other.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: other.n_features,
            });
        }
        let mut out = self.clone();
        out.features.extend_from_slice(&other.features);
        out.labels.extend_from_slice(&other.labels);
        out.augmented |= other.augmented;
        Ok(out)
    }
}

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Last,
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub label_column: LabelColumn,
    /// Raw label value of the minority class. When absent the rarer value is
    /// used; on equal counts the lexicographically greater value.
    pub minority_label: Option<String>,
    pub has_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            label_column: LabelColumn::Last,
            minority_label: None,
            has_header: true,
        }
    }
}

/// Reads a comma-separated file with real-valued features and a binary label.
pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, options)
}

pub fn read_csv<R: std::io::Read>(reader: R, options: &CsvOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let label_idx = match &options.label_column {
        LabelColumn::Index(i) => Some(*i),
        LabelColumn::Last => None,
        LabelColumn::Name(name) => {
            if !options.has_header {
                return Err(Error::InvalidConfig(
                    "label column given by name but file has no header".into(),
                ));
            }
            let headers = reader.headers()?;
            Some(headers.iter().position(|h| h == name).ok_or_else(|| {
                Error::InvalidConfig(format!("no column named {name:?}"))
            })?)
        }
    };

    let mut rows = Vec::new();
    let mut raw_labels = Vec::new();
    let mut width = None;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let label_idx = label_idx.unwrap_or(record.len().saturating_sub(1));
        if label_idx >= record.len() {
            return Err(Error::Parse {
                row: line,
                column: label_idx + 1,
                message: format!("row has only {} columns", record.len()),
            });
        }
        let mut row = Vec::with_capacity(record.len().saturating_sub(1));
        for (col, cell) in record.iter().enumerate() {
            if col == label_idx {
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                row: line,
                column: col + 1,
                message: format!("cannot parse {cell:?} as a real number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    row: line,
                    column: col + 1,
                    message: "non-finite value".into(),
                });
            }
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    row: line,
                    column: 0,
                    message: format!("expected {w} feature columns, found {}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
        raw_labels.push(record[label_idx].to_string());
    }

    if rows.is_empty() {
        return Err(Error::Empty("csv file has no data rows".into()));
    }

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for label in &raw_labels {
        *counts.entry(label.as_str()).or_default() += 1;
    }
    if counts.len() != 2 {
        return Err(Error::NotBinary(counts.len()));
    }
    let values: Vec<(&str, usize)> = counts.into_iter().collect();
    let minority = match &options.minority_label {
        Some(name) => values
            .iter()
            .map(|(v, _)| *v)
            .find(|v| v == name)
            .ok_or_else(|| Error::InvalidConfig(format!("minority label {name:?} not present")))?,
        // BTreeMap order is lexicographic, so the second value wins a tie.
        None if values[0].1 < values[1].1 => values[0].0,
        None => values[1].0,
    };
    let majority = values.iter().map(|(v, _)| *v).find(|v| *v != minority).unwrap();
    let names = [majority.to_string(), minority.to_string()];

    let classes: Vec<usize> = raw_labels
        .iter()
        .map(|l| if l == minority { MINORITY } else { MAJORITY })
        .collect();
    Ok(Dataset::from_classes(rows, &classes)?.with_class_names(names))
}

/// Per-feature min-max scaler.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl Normalizer {
    pub fn fit(train: &Dataset) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Empty("cannot fit a normalizer on no rows".into()));
        }
        let m = train.n_features();
        let mut mins = vec![f64::INFINITY; m];
        let mut maxs = vec![f64::NEG_INFINITY; m];
        for row in train.rows() {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        Ok(Self { mins, maxs })
    }

    pub fn mins(&self) -> &[f64] {
        &self.mins
    }

    pub fn maxs(&self) -> &[f64] {
        &self.maxs
    }

    /// Scales one value of feature `j`. Constant features map to 0 and
    /// values outside the fitted range are not clipped.
    pub fn scale(&self, j: usize, value: f64) -> f64 {
        let range = self.maxs[j] - self.mins[j];
        if range > 0.0 {
            (value - self.mins[j]) / range
        } else {
            0.0
        }
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.n_features() != self.mins.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mins.len(),
                got: data.n_features(),
            });
        }
        let mut out = data.clone();
        let m = self.mins.len();
        for (k, v) in out.features.iter_mut().enumerate() {
            *v = self.scale(k % m, *v);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn half(seed: u64) -> Self {
        Self {
            train_fraction: 0.5,
            seed,
        }
    }
}

/// Stratified random split into `(train, test)`.
///
/// Each class contributes `round(count * train_fraction)` rows to the
/// training half, kept strictly between 0 and `count` whenever the fraction
/// is below one so both halves see both classes.
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train fraction {} outside (0, 1]",
            spec.train_fraction
        )));
    }
    if data.len() < 4 {
        return Err(Error::InsufficientClass {
            class: MAJORITY,
            available: data.len(),
            required: 4,
        });
    }
    if !data.all_one_hot() {
        return Err(Error::InvalidConfig("split requires one-hot labels".into()));
    }
    let mut rng = rng::seeded(spec.seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for class in [MAJORITY, MINORITY] {
        let mut idx = data.class_indices(class);
        let count = idx.len();
        let needed = if spec.train_fraction < 1.0 { 2 } else { 1 };
        if count < needed {
            return Err(Error::InsufficientClass {
                class,
                available: count,
                required: needed,
            });
        }
        idx.shuffle(&mut rng);
        let mut n_train = (count as f64 * spec.train_fraction).round() as usize;
        if spec.train_fraction < 1.0 {
            n_train = n_train.clamp(1, count - 1);
        }
        train_idx.extend_from_slice(&idx[..n_train]);
        test_idx.extend_from_slice(&idx[n_train..]);
    }
    Ok((data.select(&train_idx), data.select(&test_idx)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImbalanceSpec {
    pub minority_count: usize,
    pub seed: u64,
}

/// Keeps `minority_count` minority rows chosen uniformly without
/// replacement. Majority rows and relative row order are preserved.
pub fn downsample_minority(train: &Dataset, spec: &ImbalanceSpec) -> Result<Dataset> {
    if spec.minority_count == 0 {
        return Err(Error::InvalidConfig("minority count must be positive".into()));
    }
    let minority = train.class_indices(MINORITY);
    if spec.minority_count > minority.len() {
        return Err(Error::InsufficientClass {
            class: MINORITY,
            available: minority.len(),
            required: spec.minority_count,
        });
    }
    let mut rng = rng::seeded(spec.seed);
    let mut keep = vec![true; train.len()];
    for &i in &minority {
        keep[i] = false;
    }
    for pick in index::sample(&mut rng, minority.len(), spec.minority_count) {
        keep[minority[pick]] = true;
    }
    let rows: Vec<usize> = (0..train.len()).filter(|&i| keep[i]).collect();
    Ok(train.select(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n0: usize, n1: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..n0 + n1).map(|i| vec![i as f64, (i * 2) as f64]).collect();
        let classes: Vec<usize> = (0..n0 + n1).map(|i| usize::from(i >= n0)).collect();
        Dataset::from_classes(rows, &classes).unwrap()
    }

    fn sorted_rows(d: &Dataset) -> Vec<Vec<u64>> {
        let mut rows: Vec<Vec<u64>> = (0..d.len())
            .map(|i| {
                let mut r: Vec<u64> = d.row(i).iter().map(|v| v.to_bits()).collect();
                r.extend(d.label(i).iter().map(|v| v.to_bits()));
                r
            })
            .collect();
        rows.sort();
        rows
    }

    #[test]
    fn csv_counts_and_minority() {
        let text = "x,y,label\n1,2,a\n3,4,a\n5,6,b\n7,8,a\n9,10,a\n11,12,b\n";
        let d = read_csv(text.as_bytes(), &CsvOptions::default()).unwrap();
        assert_eq!(d.majority_count(), 4);
        assert_eq!(d.minority_count(), 2);
        assert_eq!(d.class_names().unwrap()[1], "b");
        assert_eq!(d.row(2), &[5.0, 6.0]);
        assert_eq!(d.label(2), &[0.0, 1.0]);
    }

    #[test]
    fn csv_rejects_three_labels() {
        let text = "1,a\n2,b\n3,c\n";
        let opts = CsvOptions {
            has_header: false,
            ..CsvOptions::default()
        };
        assert!(matches!(read_csv(text.as_bytes(), &opts), Err(Error::NotBinary(3))));
    }

    #[test]
    fn csv_reports_parse_location() {
        let text = "f,label\n1,a\nxx,b\n";
        match read_csv(text.as_bytes(), &CsvOptions::default()) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_empty_and_named_column() {
        assert!(matches!(
            read_csv("a,b\n".as_bytes(), &CsvOptions::default()),
            Err(Error::Empty(_))
        ));
        let text = "cls,f\nx,1\ny,2\ny,3\n";
        let opts = CsvOptions {
            label_column: LabelColumn::Name("cls".into()),
            ..CsvOptions::default()
        };
        let d = read_csv(text.as_bytes(), &opts).unwrap();
        assert_eq!(d.n_features(), 1);
        assert_eq!(d.class_names().unwrap(), &["y".to_string(), "x".to_string()]);
    }

    #[test]
    fn csv_tie_goes_to_greater_label() {
        let text = "1,0\n2,1\n";
        let opts = CsvOptions {
            has_header: false,
            ..CsvOptions::default()
        };
        let d = read_csv(text.as_bytes(), &opts).unwrap();
        assert_eq!(d.class_names().unwrap()[1], "1");
        assert_eq!(d.label(1), &[0.0, 1.0]);
    }

    #[test]
    fn normalizer_examples() {
        let train = Dataset::from_classes(
            vec![vec![0.0, 3.0], vec![5.0, 3.0], vec![10.0, 3.0]],
            &[0, 0, 1],
        )
        .unwrap();
        let norm = Normalizer::fit(&train).unwrap();
        let scaled = norm.apply(&train).unwrap();
        let col0: Vec<f64> = scaled.rows().map(|r| r[0]).collect();
        let col1: Vec<f64> = scaled.rows().map(|r| r[1]).collect();
        assert_eq!(col0, vec![0.0, 0.5, 1.0]);
        assert_eq!(col1, vec![0.0, 0.0, 0.0]);
        let test = Dataset::from_classes(vec![vec![12.0, 4.0]], &[0]).unwrap();
        let t = norm.apply(&test).unwrap();
        assert!((t.row(0)[0] - 1.2).abs() < 1e-12);
        assert!(Normalizer::fit(&Dataset::empty(2)).is_err());
    }

    #[test]
    fn stratified_split_counts() {
        let d = toy(100, 20);
        let (train, test) = split(&d, &SplitSpec::half(3)).unwrap();
        assert_eq!(train.majority_count(), 50);
        assert_eq!(train.minority_count(), 10);
        assert_eq!(test.majority_count(), 50);
        assert_eq!(test.minority_count(), 10);
        let (train2, _) = split(&d, &SplitSpec::half(3)).unwrap();
        assert_eq!(train, train2);
        assert_eq!(sorted_rows(&train.concat(&test).unwrap()), sorted_rows(&d));
    }

    #[test]
    fn split_needs_minority_in_both_halves() {
        let d = toy(10, 1);
        assert!(matches!(
            split(&d, &SplitSpec::half(0)),
            Err(Error::InsufficientClass { class: MINORITY, .. })
        ));
        let d = toy(10, 0);
        assert!(split(&d, &SplitSpec::half(0)).is_err());
    }

    #[test]
    fn downsample_examples() {
        let d = toy(30, 250);
        let spec = ImbalanceSpec {
            minority_count: 4,
            seed: 1,
        };
        let small = downsample_minority(&d, &spec).unwrap();
        assert_eq!(small.minority_count(), 4);
        assert_eq!(small.majority_count(), 30);
        assert_eq!(&small.select(&(0..30).collect::<Vec<_>>()), &d.select(&(0..30).collect::<Vec<_>>()));

        let same = downsample_minority(
            &d,
            &ImbalanceSpec {
                minority_count: 250,
                seed: 9,
            },
        )
        .unwrap();
        assert_eq!(same, d);

        let a = downsample_minority(&d, &ImbalanceSpec { minority_count: 4, seed: 2 }).unwrap();
        assert_eq!(a.minority_count(), 4);

        assert!(downsample_minority(&d, &ImbalanceSpec { minority_count: 251, seed: 2 }).is_err());
    }

    #[test]
    fn soft_labels_mark_augmented() {
        let mut d = toy(2, 2);
        assert!(!d.is_augmented());
        d.push(&[0.5, 0.5], [0.3, 0.7]).unwrap();
        assert!(d.is_augmented());
        assert_eq!(d.minority_count(), 2);
        assert!(d.push(&[0.5, 0.5], [0.3, 0.6]).is_err());
        assert!(d.push(&[0.5], [0.3, 0.7]).is_err());
    }
}
