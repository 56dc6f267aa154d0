//! Tabular binary-classification data: loading, validation, splitting and
//! resampling.
//!
//! All randomness flows through [`RngStream`](crate::rng::RngStream); every
//! operation here is a pure function of its inputs and the stream state, so
//! repeated runs with the same seed reproduce byte-identical results.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Dense row-major matrix of feature values.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    /// Builds a matrix from a flat row-major buffer.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidDataset(format!(
                "buffer of {} values cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { data, rows, cols })
    }

    /// Builds a matrix from per-row vectors, which must all share a length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::InvalidDataset("ragged rows".into()));
        }
        Ok(Self {
            data: rows.into_iter().flatten().collect(),
            rows: n,
            cols: p,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    /// One row as a contiguous slice.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

/// An n x p feature matrix with binary labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<u8>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Validates shapes, finiteness and label values.
    pub fn new(features: Matrix, labels: Vec<u8>, feature_names: Vec<String>) -> Result<Self> {
        if features.n_rows() == 0 || features.n_cols() == 0 {
            return Err(Error::InvalidDataset(
                "datasets need at least one row and one feature".into(),
            ));
        }
        if labels.len() != features.n_rows() {
            return Err(Error::InvalidDataset(format!(
                "{} labels for {} rows",
                labels.len(),
                features.n_rows()
            )));
        }
        if feature_names.len() != features.n_cols() {
            return Err(Error::InvalidDataset(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                features.n_cols()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&y| y > 1) {
            return Err(Error::NonBinaryLabel(format!("label value {bad}")));
        }
        if features.data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDataset(
                "feature matrix contains a non-finite value".into(),
            ));
        }
        Ok(Self {
            features,
            labels,
            feature_names,
        })
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.features.n_rows()
    }

    /// Number of features.
    pub fn p(&self) -> usize {
        self.features.n_cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, row: usize) -> u8 {
        self.labels[row]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        self.features.row(row)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Counts of (class 0, class 1) instances.
    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.labels.iter().filter(|&&y| y == 1).count();
        (self.labels.len() - ones, ones)
    }

    pub fn has_both_classes(&self) -> bool {
        let (zeros, ones) = self.class_counts();
        zeros > 0 && ones > 0
    }

    /// New dataset holding the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let p = self.p();
        let mut data = Vec::with_capacity(rows.len() * p);
        let mut labels = Vec::with_capacity(rows.len());
        for &r in rows {
            if r >= self.n() {
                return Err(Error::InvalidDataset(format!(
                    "row index {r} out of range for {} rows",
                    self.n()
                )));
            }
            data.extend_from_slice(self.features.row(r));
            labels.push(self.labels[r]);
        }
        Dataset::new(Matrix::new(rows.len(), p, data)?, labels, self.feature_names.clone())
    }
}

/// Loads a CSV dataset: UTF-8, comma-separated, mandatory header row.
///
/// `label_column` selects the label by header name; `None` takes the last
/// column. Label cells must parse exactly to 0 or 1; every other cell must
/// parse to a finite real.
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::ParseError(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if headers.len() < 2 {
        return Err(Error::ParseError(
            "need at least one feature column and one label column".into(),
        ));
    }
    let label_idx = match label_column {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::ParseError(format!("label column '{name}' not found")))?,
        None => headers.len() - 1,
    };
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::ParseError(e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::ParseError(format!(
                "row {} has {} fields, header has {}",
                line + 2,
                record.len(),
                headers.len()
            )));
        }
        let mut row = Vec::with_capacity(headers.len() - 1);
        for (col, field) in record.iter().enumerate() {
            if field.is_empty() {
                return Err(Error::MissingValue(format!(
                    "empty cell at row {}, column '{}'",
                    line + 2,
                    headers[col]
                )));
            }
            let value: f64 = field.parse().map_err(|_| {
                Error::ParseError(format!(
                    "cannot parse '{field}' at row {}, column '{}'",
                    line + 2,
                    headers[col]
                ))
            })?;
            if value.is_nan() {
                return Err(Error::MissingValue(format!(
                    "NaN cell at row {}, column '{}'",
                    line + 2,
                    headers[col]
                )));
            }
            if !value.is_finite() {
                return Err(Error::ParseError(format!(
                    "non-finite value at row {}, column '{}'",
                    line + 2,
                    headers[col]
                )));
            }
            if col == label_idx {
                if value == 0.0 {
                    labels.push(0);
                } else if value == 1.0 {
                    labels.push(1);
                } else {
                    return Err(Error::NonBinaryLabel(format!(
                        "label '{field}' at row {} is not 0 or 1",
                        line + 2
                    )));
                }
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(Error::InvalidDataset(format!(
            "{} data rows; need at least 2",
            rows.len()
        )));
    }
    Dataset::new(Matrix::from_rows(rows)?, labels, feature_names)
}

/// Writes a dataset in the same CSV dialect `load_csv` reads, with the label
/// in a final `class` column. Values use shortest round-trip formatting, so a
/// reload reproduces the dataset exactly.
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for name in data.feature_names() {
        out.push_str(name);
        out.push(',');
    }
    out.push_str("class\n");
    for i in 0..data.n() {
        for x in data.row(i) {
            let _ = write!(out, "{x},");
        }
        let _ = writeln!(out, "{}", data.label(i));
    }
    std::fs::write(path.as_ref(), out)
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.as_ref().display())))
}

/// Row indices of one train/test partition.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Draws the index partition behind [`train_test_split`].
///
/// The split is simple random (not stratified): a seeded shuffle of `0..n`
/// with the first `floor(train_fraction * n)` rows going to train. If the
/// training part misses a class the shuffle is retried, up to 100 attempts.
pub fn train_test_split_indices(
    data: &Dataset,
    train_fraction: f64,
    rng: &mut RngStream,
) -> Result<SplitIndices> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::DegenerateSplit(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let n = data.n();
    let n_train = (train_fraction * n as f64).floor() as usize;
    if n_train < 2 || n - n_train < 1 {
        return Err(Error::DegenerateSplit(format!(
            "{n} rows at fraction {train_fraction} leave {n_train} train / {} test rows",
            n - n_train
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..100 {
        rng.shuffle(&mut order);
        let train = &order[..n_train];
        let mut seen = [false; 2];
        for &i in train {
            seen[data.label(i) as usize] = true;
        }
        if seen[0] && seen[1] {
            return Ok(SplitIndices {
                train: train.to_vec(),
                test: order[n_train..].to_vec(),
            });
        }
        order = (0..n).collect();
    }
    Err(Error::DegenerateSplit(
        "no shuffle produced both classes in the training part after 100 attempts".into(),
    ))
}

/// Splits a dataset into mutually exclusive train and test parts.
pub fn train_test_split(
    data: &Dataset,
    train_fraction: f64,
    rng: &mut RngStream,
) -> Result<(Dataset, Dataset)> {
    let idx = train_test_split_indices(data, train_fraction, rng)?;
    Ok((data.subset(&idx.train)?, data.subset(&idx.test)?))
}

/// Rule that resolves the feature-subset size p' from p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureRule {
    /// p' = max(1, floor(sqrt(p)))
    SqrtP,
    /// p' = max(1, floor(p / d))
    POver(u32),
    /// p' = the given value, which must lie in [1, p].
    Fixed(usize),
}

impl FeatureRule {
    /// Resolves the subset size for a p-dimensional feature space.
    pub fn resolve(&self, p: usize) -> Result<usize> {
        let p_prime = match *self {
            FeatureRule::SqrtP => (p as f64).sqrt().floor() as usize,
            FeatureRule::POver(d) => {
                if d == 0 {
                    return Err(Error::ConfigInvalid("feature rule p/0".into()));
                }
                p / d as usize
            }
            FeatureRule::Fixed(m) => m,
        }
        .max(1);
        if p_prime > p {
            return Err(Error::InvalidSubsetSize { p_prime, p });
        }
        Ok(p_prime)
    }
}

/// One base learner's bootstrap rows and feature subset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseLearnerSample {
    /// `n_train` draws with replacement from `0..n_train`, in draw order.
    pub row_indices: Vec<usize>,
    /// `p'` distinct feature indices, sorted ascending.
    pub feature_indices: Vec<usize>,
}

/// Draws one bootstrap row multiset plus one feature subset.
///
/// Rows are drawn first (n_train calls to `rng.index`), then features via
/// `rng.sample_without_replacement`.
pub fn draw_base_learner_sample(
    n_train: usize,
    p: usize,
    p_prime: usize,
    rng: &mut RngStream,
) -> Result<BaseLearnerSample> {
    if p_prime < 1 || p_prime > p {
        return Err(Error::InvalidSubsetSize { p_prime, p });
    }
    if n_train == 0 {
        return Err(Error::InvalidDataset("cannot bootstrap zero rows".into()));
    }
    let row_indices = (0..n_train).map(|_| rng.index(n_train)).collect();
    let feature_indices = rng.sample_without_replacement(p, p_prime);
    Ok(BaseLearnerSample {
        row_indices,
        feature_indices,
    })
}

/// Per-feature z-score parameters, fitted on training data only.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer {
    means: Vec<f64>,
    sds: Vec<f64>,
}

impl Standardizer {
    /// Column means and sample standard deviations (n - 1 denominator).
    /// Constant columns get sd 1 so they pass through unscaled.
    pub fn fit(train: &Dataset) -> Self {
        let n = train.n();
        let p = train.p();
        let mut means = vec![0.0; p];
        for i in 0..n {
            for (j, x) in train.row(i).iter().enumerate() {
                means[j] += x;
            }
        }
        for m in &mut means {
            *m /= n as f64;
        }
        let mut sds = vec![0.0; p];
        for i in 0..n {
            for (j, x) in train.row(i).iter().enumerate() {
                sds[j] += (x - means[j]).powi(2);
            }
        }
        for s in &mut sds {
            *s = if n > 1 { (*s / (n - 1) as f64).sqrt() } else { 0.0 };
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Self { means, sds }
    }

    pub fn transform(&self, data: &Dataset) -> Result<Dataset> {
        if data.p() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                got: data.p(),
            });
        }
        let mut buf = Vec::with_capacity(data.n() * data.p());
        for i in 0..data.n() {
            for (j, x) in data.row(i).iter().enumerate() {
                buf.push((x - self.means[j]) / self.sds[j]);
            }
        }
        Dataset::new(
            Matrix::new(data.n(), data.p(), buf)?,
            data.labels().to_vec(),
            data.feature_names().to_vec(),
        )
    }
}
