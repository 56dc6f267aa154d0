//! Minkowski distances and nearest-candidate search on feature subsets.

use serde::{Deserialize, Serialize};

use crate::dataset::Matrix;
use crate::error::{Error, Result};

/// A Minkowski metric with exponent q >= 1; q = 2 is Euclidean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DistanceMetric {
    exponent_q: f64,
}

impl DistanceMetric {
    pub fn new(exponent_q: f64) -> Result<Self> {
        if exponent_q < 1.0 || !exponent_q.is_finite() {
            return Err(Error::ConfigInvalid(format!(
                "Minkowski exponent {exponent_q} must be a finite value >= 1"
            )));
        }
        Ok(Self { exponent_q })
    }

    pub fn euclidean() -> Self {
        Self { exponent_q: 2.0 }
    }

    pub fn manhattan() -> Self {
        Self { exponent_q: 1.0 }
    }

    pub fn exponent_q(&self) -> f64 {
        self.exponent_q
    }

    /// Distance accumulated from coordinate pairs; callers guarantee equal
    /// lengths. q = 1 and q = 2 take exact fast paths.
    fn accumulate(&self, pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
        let q = self.exponent_q;
        if q == 1.0 {
            pairs.map(|(a, b)| (a - b).abs()).sum()
        } else if q == 2.0 {
            pairs.map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
        } else {
            pairs
                .map(|(a, b)| (a - b).abs().powf(q))
                .sum::<f64>()
                .powf(1.0 / q)
        }
    }
}

impl Default for DistanceMetric {
    fn default() -> Self {
        Self::euclidean()
    }
}

impl TryFrom<f64> for DistanceMetric {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<DistanceMetric> for f64 {
    fn from(m: DistanceMetric) -> f64 {
        m.exponent_q
    }
}

/// Minkowski distance between two equal-length vectors.
pub fn minkowski(a: &[f64], b: &[f64], metric: DistanceMetric) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: a.len().max(1),
            got: b.len(),
        });
    }
    Ok(metric.accumulate(a.iter().copied().zip(b.iter().copied())))
}

/// A feature matrix restricted to a subset of its columns.
#[derive(Clone, Copy, Debug)]
pub struct SubspaceView<'a> {
    features: &'a Matrix,
    feature_indices: &'a [usize],
}

impl<'a> SubspaceView<'a> {
    pub fn new(features: &'a Matrix, feature_indices: &'a [usize]) -> Result<Self> {
        if feature_indices.is_empty() {
            return Err(Error::InvalidSubsetSize {
                p_prime: 0,
                p: features.n_cols(),
            });
        }
        if let Some(&bad) = feature_indices.iter().find(|&&j| j >= features.n_cols()) {
            return Err(Error::InvalidSubsetSize {
                p_prime: bad,
                p: features.n_cols(),
            });
        }
        Ok(Self {
            features,
            feature_indices,
        })
    }

    /// Dimensionality of the subspace.
    pub fn dim(&self) -> usize {
        self.feature_indices.len()
    }

    /// The selected coordinates of one matrix row.
    pub fn project_row(&self, row: usize) -> Vec<f64> {
        let r = self.features.row(row);
        self.feature_indices.iter().map(|&j| r[j]).collect()
    }

    /// Distance between a full matrix row (gathered through the subset) and
    /// an already-projected query.
    pub fn distance_to_row(&self, row: usize, query: &[f64], metric: DistanceMetric) -> f64 {
        let r = self.features.row(row);
        metric.accumulate(
            self.feature_indices
                .iter()
                .map(|&j| r[j])
                .zip(query.iter().copied()),
        )
    }
}

/// Scans a candidate pool and returns `(pool position, distance)` of the
/// entry closest to `query`.
///
/// `pool` lists training-row indices in its iteration order; on exact
/// distance ties the smallest pool position wins, which keeps ensembles
/// deterministic even when a bootstrap duplicates rows.
pub fn nearest_in_pool(
    pool: &[usize],
    view: &SubspaceView<'_>,
    query: &[f64],
    metric: DistanceMetric,
) -> Result<(usize, f64)> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    if query.len() != view.dim() {
        return Err(Error::DimensionMismatch {
            expected: view.dim(),
            got: query.len(),
        });
    }
    let mut best_pos = 0;
    let mut best_dist = view.distance_to_row(pool[0], query, metric);
    for (pos, &row) in pool.iter().enumerate().skip(1) {
        let d = view.distance_to_row(row, query, metric);
        if d < best_dist {
            best_pos = pos;
            best_dist = d;
        }
    }
    Ok((best_pos, best_dist))
}
