//! kNN-family comparators: plain kNN, distance-weighted kNN, the
//! random-subspace kNN ensemble, and a cross-validated k tuner.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureRule};
use crate::distance::{DistanceMetric, SubspaceView};
use crate::error::{Error, Result};
use crate::exnrule::ensemble_vote;
use crate::rng::RngStream;

/// Guard added to distances before inverting them into weights.
pub const WKNN_EPSILON: f64 = 1e-12;

/// Plain / weighted kNN configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
    pub metric: DistanceMetric,
}

impl KnnConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            metric: DistanceMetric::euclidean(),
        }
    }
}

/// Random-subspace kNN ensemble configuration. Base learners draw feature
/// subsets only — no row bootstrap, unlike the extended-rule ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RknnConfig {
    pub ensemble_size: usize,
    pub k: usize,
    pub feature_rule: FeatureRule,
    pub metric: DistanceMetric,
    pub master_seed: u64,
}

impl RknnConfig {
    pub fn new(master_seed: u64) -> Self {
        Self {
            ensemble_size: 500,
            k: 3,
            feature_rule: FeatureRule::SqrtP,
            metric: DistanceMetric::euclidean(),
            master_seed,
        }
    }
}

/// The k training rows closest to `query`, as `(row, distance)` sorted by
/// distance; ties at a radius resolve by row order. `feature_indices`
/// restricts the metric to a subspace and expects a projected query.
fn k_nearest(
    train: &Dataset,
    query: &[f64],
    k: usize,
    metric: DistanceMetric,
    feature_indices: Option<&[usize]>,
) -> Result<Vec<(usize, f64)>> {
    let n = train.n();
    if k == 0 || k > n {
        return Err(Error::ConfigInvalid(format!(
            "k = {k} outside [1, {n}]"
        )));
    }
    let mut scored: Vec<(usize, f64)> = match feature_indices {
        None => {
            if query.len() != train.p() {
                return Err(Error::DimensionMismatch {
                    expected: train.p(),
                    got: query.len(),
                });
            }
            (0..n)
                .map(|i| {
                    let d = crate::distance::minkowski(train.row(i), query, metric)
                        .expect("rows and query share a length");
                    (i, d)
                })
                .collect()
        }
        Some(idx) => {
            let view = SubspaceView::new(train.features(), idx)?;
            if query.len() != view.dim() {
                return Err(Error::DimensionMismatch {
                    expected: view.dim(),
                    got: query.len(),
                });
            }
            (0..n)
                .map(|i| (i, view.distance_to_row(i, query, metric)))
                .collect()
        }
    };
    scored.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored)
}

fn vote_unweighted(train: &Dataset, neighbours: &[(usize, f64)]) -> (u8, f64) {
    let k = neighbours.len();
    let ones = neighbours
        .iter()
        .filter(|&&(row, _)| train.label(row) == 1)
        .count();
    let label = match (2 * ones).cmp(&k) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => train.label(neighbours[0].0),
    };
    (label, ones as f64 / k as f64)
}

/// Majority vote over the k nearest training rows.
pub fn knn_predict(train: &Dataset, query: &[f64], config: &KnnConfig) -> Result<(u8, f64)> {
    let neighbours = k_nearest(train, query, config.k, config.metric, None)?;
    Ok(vote_unweighted(train, &neighbours))
}

/// Inverse-distance-weighted vote over the k nearest training rows: weight
/// 1 / (d + 1e-12), probability = class-1 weight share. An exact tie in
/// weighted mass goes to the nearest neighbour's label.
pub fn wknn_predict(train: &Dataset, query: &[f64], config: &KnnConfig) -> Result<(u8, f64)> {
    let neighbours = k_nearest(train, query, config.k, config.metric, None)?;
    let mut mass = [0.0f64; 2];
    for &(row, d) in &neighbours {
        mass[train.label(row) as usize] += 1.0 / (d + WKNN_EPSILON);
    }
    let prob = mass[1] / (mass[0] + mass[1]);
    let label = if mass[1] > mass[0] {
        1
    } else if mass[1] < mass[0] {
        0
    } else {
        train.label(neighbours[0].0)
    };
    Ok((label, prob))
}

/// A fitted random-subspace ensemble: B feature subsets over shared rows.
#[derive(Clone, Debug)]
pub struct RknnModel<'a> {
    train: &'a Dataset,
    config: RknnConfig,
    feature_subsets: Vec<Vec<usize>>,
}

/// Draws the B feature subsets; learner b uses stream `(master_seed, b)`.
pub fn rknn_fit(train: &Dataset, config: RknnConfig) -> Result<RknnModel<'_>> {
    if config.ensemble_size == 0 {
        return Err(Error::ConfigInvalid("ensemble size must be >= 1".into()));
    }
    if config.k == 0 || config.k > train.n() {
        return Err(Error::ConfigInvalid(format!(
            "k = {} outside [1, {}]",
            config.k,
            train.n()
        )));
    }
    let p_prime = config.feature_rule.resolve(train.p())?;
    let feature_subsets = (0..config.ensemble_size)
        .map(|b| {
            let mut rng = RngStream::new(config.master_seed, b as u64);
            rng.sample_without_replacement(train.p(), p_prime)
        })
        .collect();
    Ok(RknnModel {
        train,
        config,
        feature_subsets,
    })
}

impl RknnModel<'_> {
    pub fn config(&self) -> &RknnConfig {
        &self.config
    }

    pub fn feature_subsets(&self) -> &[Vec<usize>] {
        &self.feature_subsets
    }
}

/// Majority over the base kNN votes; probability is the mean of the base
/// class-1 fractions, ties as in the extended-rule ensemble.
pub fn rknn_predict(model: &RknnModel<'_>, query: &[f64]) -> Result<(u8, f64)> {
    if query.len() != model.train.p() {
        return Err(Error::DimensionMismatch {
            expected: model.train.p(),
            got: query.len(),
        });
    }
    let mut votes = Vec::with_capacity(model.feature_subsets.len());
    let mut probs = Vec::with_capacity(model.feature_subsets.len());
    for subset in &model.feature_subsets {
        let projected: Vec<f64> = subset.iter().map(|&j| query[j]).collect();
        let neighbours = k_nearest(
            model.train,
            &projected,
            model.config.k,
            model.config.metric,
            Some(subset),
        )?;
        let (label, prob) = vote_unweighted(model.train, &neighbours);
        votes.push(label);
        probs.push(prob);
    }
    Ok(ensemble_vote(&votes, &probs))
}

/// Which kNN-family learner a tuning run drives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KnnFamilyConfig {
    Knn(KnnConfig),
    Wknn(KnnConfig),
    Rknn(RknnConfig),
}

impl KnnFamilyConfig {
    fn evaluate_fold(
        &self,
        fold_train: &Dataset,
        fold_val: &Dataset,
        k: usize,
        rng: &mut RngStream,
    ) -> Result<f64> {
        let mut hits = 0usize;
        match self {
            KnnFamilyConfig::Knn(c) => {
                let c = KnnConfig { k, ..*c };
                for i in 0..fold_val.n() {
                    let (label, _) = knn_predict(fold_train, fold_val.row(i), &c)?;
                    hits += usize::from(label == fold_val.label(i));
                }
            }
            KnnFamilyConfig::Wknn(c) => {
                let c = KnnConfig { k, ..*c };
                for i in 0..fold_val.n() {
                    let (label, _) = wknn_predict(fold_train, fold_val.row(i), &c)?;
                    hits += usize::from(label == fold_val.label(i));
                }
            }
            KnnFamilyConfig::Rknn(c) => {
                let c = RknnConfig {
                    k,
                    master_seed: rng.next_u64(),
                    ..*c
                };
                let model = rknn_fit(fold_train, c)?;
                for i in 0..fold_val.n() {
                    let (label, _) = rknn_predict(&model, fold_val.row(i))?;
                    hits += usize::from(label == fold_val.label(i));
                }
            }
        }
        Ok(hits as f64 / fold_val.n() as f64)
    }
}

/// Picks the grid value with the highest mean cross-validated accuracy;
/// exact ties go to the smaller k.
///
/// Folds come from one seeded shuffle of the row indices, split into
/// near-equal contiguous chunks. Grid values are deduplicated and visited
/// in ascending order, so the result does not depend on grid ordering; a
/// grid value larger than the smallest fold-training size is skipped.
pub fn tune_k(
    train: &Dataset,
    grid: &[usize],
    folds: usize,
    learner: &KnnFamilyConfig,
    rng: &mut RngStream,
) -> Result<usize> {
    if grid.is_empty() {
        return Err(Error::ConfigInvalid("empty tuning grid".into()));
    }
    if folds < 2 {
        return Err(Error::ConfigInvalid("tuning needs at least 2 folds".into()));
    }
    let n = train.n();
    if folds > n {
        return Err(Error::DegenerateFolds(format!(
            "{folds} folds over {n} rows"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    let base = n / folds;
    let extra = n % folds;
    let mut fold_rows: Vec<Vec<usize>> = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        fold_rows.push(order[start..start + len].to_vec());
        start += len;
    }

    let mut splits = Vec::with_capacity(folds);
    for f in 0..folds {
        let val_rows = &fold_rows[f];
        let train_rows: Vec<usize> = fold_rows
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, rows)| rows.iter().copied())
            .collect();
        let fold_train = train.subset(&train_rows)?;
        if !fold_train.has_both_classes() {
            return Err(Error::DegenerateFolds(format!(
                "fold {f} training part holds a single class"
            )));
        }
        splits.push((fold_train, train.subset(val_rows)?));
    }
    let min_fold_train = splits.iter().map(|(t, _)| t.n()).min().unwrap();

    let mut ks: Vec<usize> = grid.to_vec();
    ks.sort_unstable();
    ks.dedup();

    let mut best: Option<(usize, f64)> = None;
    for &k in &ks {
        if k == 0 || k > min_fold_train {
            continue;
        }
        let mut total = 0.0;
        for (fold_train, fold_val) in &splits {
            total += learner.evaluate_fold(fold_train, fold_val, k, rng)?;
        }
        let mean = total / folds as f64;
        if best.is_none_or(|(_, acc)| mean > acc) {
            best = Some((k, mean));
        }
    }
    best.map(|(k, _)| k).ok_or_else(|| {
        Error::ConfigInvalid("no grid value fits the fold-training sizes".into())
    })
}
