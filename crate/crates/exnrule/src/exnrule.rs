//! The extended-neighbourhood-rule ensemble classifier.
//!
//! Plain kNN ranks training points by their distance to the query, which
//! confines the vote to a sphere around it. The extended rule instead walks
//! a chain: the first neighbour is the closest point to the query, the
//! second is the closest remaining point to the first, and so on for k
//! hops. A chain can follow an elongated structure out of the sphere that
//! plain kNN is stuck in.
//!
//! The ensemble draws B bootstrap samples, each restricted to a random
//! feature subset, runs one chain per base learner and votes twice: over
//! the k chain labels within a learner, then over the B learner labels.

use serde::{Deserialize, Serialize};

use crate::dataset::{draw_base_learner_sample, BaseLearnerSample, Dataset, FeatureRule, Matrix};
use crate::distance::{nearest_in_pool, DistanceMetric, SubspaceView};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Configuration of the ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExNRuleConfig {
    /// Number of base learners (B).
    pub ensemble_size: usize,
    /// Number of chain hops per base learner (k).
    pub chain_length: usize,
    /// How the per-learner feature-subset size is resolved.
    pub feature_rule: FeatureRule,
    pub metric: DistanceMetric,
    pub master_seed: u64,
    /// Draw rows with replacement per learner. Off means every learner
    /// sees each training row exactly once.
    pub bootstrap: bool,
}

impl ExNRuleConfig {
    /// The defaults used throughout the benchmark driver: B = 500, k = 3,
    /// p' = floor(sqrt(p)), Euclidean distance, bootstrap on.
    pub fn new(master_seed: u64) -> Self {
        Self {
            ensemble_size: 500,
            chain_length: 3,
            feature_rule: FeatureRule::SqrtP,
            metric: DistanceMetric::euclidean(),
            master_seed,
            bootstrap: true,
        }
    }

    /// Checks the configuration against a training-set shape and returns
    /// the resolved subset size p'.
    pub fn validate(&self, n_train: usize, p: usize) -> Result<usize> {
        if self.ensemble_size == 0 {
            return Err(Error::ConfigInvalid("ensemble size must be >= 1".into()));
        }
        if self.chain_length == 0 {
            return Err(Error::ConfigInvalid("chain length must be >= 1".into()));
        }
        if self.chain_length > n_train {
            return Err(Error::ConfigInvalid(format!(
                "chain length {} exceeds the {} training rows",
                self.chain_length, n_train
            )));
        }
        self.feature_rule.resolve(p)
    }
}

/// A fitted ensemble. Fitting only draws the per-learner samples; chains
/// depend on the query, so they are computed at prediction time like in
/// every kNN-family method.
#[derive(Clone, Debug)]
pub struct ExNRuleModel<'a> {
    train: &'a Dataset,
    config: ExNRuleConfig,
    samples: Vec<BaseLearnerSample>,
}

/// Ordered record of one base learner's neighbour chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainResult {
    /// Position of each hop within the learner's original pool. Distinct by
    /// construction: the chain selects without replacement.
    pub pool_positions: Vec<usize>,
    /// Training-row index behind each hop. A row the bootstrap duplicated
    /// can appear twice, through two distinct pool positions.
    pub row_indices: Vec<usize>,
    /// Label of each hop.
    pub labels: Vec<u8>,
    /// Distance from the previous chain point (the query for hop one) to
    /// each hop, measured on the learner's feature subset.
    pub hop_distances: Vec<f64>,
}

impl ChainResult {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// An ensemble prediction for one query.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: u8,
    /// Mean of the base learners' chain class-1 proportions.
    pub prob_class1: f64,
    /// The B base-learner votes, in learner order.
    pub per_base_votes: Option<Vec<u8>>,
}

/// Draws the B base-learner samples for a training set.
///
/// Learner b draws from the stream `(master_seed, b)`, so fitting is
/// reproducible and parallel-safe by construction.
pub fn fit(train: &Dataset, config: ExNRuleConfig) -> Result<ExNRuleModel<'_>> {
    let p_prime = config.validate(train.n(), train.p())?;
    if !train.has_both_classes() {
        return Err(Error::SingleClassTraining);
    }
    let n = train.n();
    let samples = (0..config.ensemble_size)
        .map(|b| {
            let mut rng = RngStream::new(config.master_seed, b as u64);
            if config.bootstrap {
                draw_base_learner_sample(n, train.p(), p_prime, &mut rng)
            } else {
                Ok(BaseLearnerSample {
                    row_indices: (0..n).collect(),
                    feature_indices: rng.sample_without_replacement(train.p(), p_prime),
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExNRuleModel {
        train,
        config,
        samples,
    })
}

/// Walks one greedy neighbour chain through a base learner's pool.
///
/// Hop i selects the closest remaining pool entry to the previous chain
/// point (the projected query for i = 1) and removes that entry — only that
/// occurrence, if the bootstrap duplicated the row.
pub fn extended_chain(
    sample: &BaseLearnerSample,
    train: &Dataset,
    query_projected: &[f64],
    k: usize,
    metric: DistanceMetric,
) -> Result<ChainResult> {
    if k > sample.row_indices.len() {
        return Err(Error::ChainExhausted {
            requested: k,
            pool: sample.row_indices.len(),
        });
    }
    let view = SubspaceView::new(train.features(), &sample.feature_indices)?;
    if query_projected.len() != view.dim() {
        return Err(Error::DimensionMismatch {
            expected: view.dim(),
            got: query_projected.len(),
        });
    }

    let mut pool: Vec<usize> = sample.row_indices.clone();
    let mut origin: Vec<usize> = (0..pool.len()).collect();
    let mut current = query_projected.to_vec();
    let mut chain = ChainResult {
        pool_positions: Vec::with_capacity(k),
        row_indices: Vec::with_capacity(k),
        labels: Vec::with_capacity(k),
        hop_distances: Vec::with_capacity(k),
    };
    for _ in 0..k {
        let (pos, dist) = nearest_in_pool(&pool, &view, &current, metric)?;
        let row = pool.remove(pos);
        chain.pool_positions.push(origin.remove(pos));
        chain.row_indices.push(row);
        chain.labels.push(train.label(row));
        chain.hop_distances.push(dist);
        current = view.project_row(row);
    }
    Ok(chain)
}

/// Votes over one chain: the label majority and the class-1 proportion.
/// An even split goes to the first hop, the point nearest the query.
pub fn base_predict(chain: &ChainResult) -> (u8, f64) {
    debug_assert!(!chain.is_empty());
    let k = chain.labels.len();
    let ones = chain.labels.iter().filter(|&&y| y == 1).count();
    let label = match (2 * ones).cmp(&k) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => chain.labels[0],
    };
    (label, ones as f64 / k as f64)
}

/// Majority over base votes; even splits go to the side with the higher
/// mean probability, then to class 0.
pub(crate) fn ensemble_vote(votes: &[u8], probs: &[f64]) -> (u8, f64) {
    debug_assert_eq!(votes.len(), probs.len());
    debug_assert!(!votes.is_empty());
    let b = votes.len();
    let ones = votes.iter().filter(|&&y| y == 1).count();
    let mean_prob = probs.iter().sum::<f64>() / b as f64;
    let label = match (2 * ones).cmp(&b) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => u8::from(mean_prob > 0.5),
    };
    (label, mean_prob)
}

impl<'a> ExNRuleModel<'a> {
    pub fn config(&self) -> &ExNRuleConfig {
        &self.config
    }

    pub fn samples(&self) -> &[BaseLearnerSample] {
        &self.samples
    }

    pub fn train(&self) -> &'a Dataset {
        self.train
    }

    /// Classifies one query: one chain per base learner, then the two-level
    /// vote. The ensemble probability is the mean of the chain proportions,
    /// which is smoother than the vote fraction; the votes themselves are
    /// returned so the fraction stays recoverable.
    pub fn predict(&self, query: &[f64]) -> Result<Prediction> {
        if query.len() != self.train.p() {
            return Err(Error::DimensionMismatch {
                expected: self.train.p(),
                got: query.len(),
            });
        }
        let mut votes = Vec::with_capacity(self.samples.len());
        let mut probs = Vec::with_capacity(self.samples.len());
        for sample in &self.samples {
            let projected: Vec<f64> = sample.feature_indices.iter().map(|&j| query[j]).collect();
            let chain = extended_chain(
                sample,
                self.train,
                &projected,
                self.config.chain_length,
                self.config.metric,
            )?;
            let (label, prob) = base_predict(&chain);
            votes.push(label);
            probs.push(prob);
        }
        let (label, prob_class1) = ensemble_vote(&votes, &probs);
        Ok(Prediction {
            label,
            prob_class1,
            per_base_votes: Some(votes),
        })
    }

    /// Classifies every row of a query matrix. Queries are evaluated in
    /// parallel; each is a pure function of the model, so the output is
    /// identical to sequential `predict` calls in any thread layout.
    pub fn predict_batch(&self, queries: &Matrix) -> Result<Vec<Prediction>> {
        use rayon::prelude::*;

        if queries.n_cols() != self.train.p() {
            return Err(Error::DimensionMismatch {
                expected: self.train.p(),
                got: queries.n_cols(),
            });
        }
        (0..queries.n_rows())
            .into_par_iter()
            .map(|i| self.predict(queries.row(i)))
            .collect()
    }

    /// Portable description of the fitted model (config plus samples).
    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            n_train: self.train.n(),
            p: self.train.p(),
            config: self.config,
            samples: self.samples.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("model documents serialize")
    }

    /// Rebuilds a model from a document against the training data it was
    /// fitted on.
    pub fn from_document(train: &'a Dataset, doc: ModelDocument) -> Result<Self> {
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelDocument(format!(
                "unsupported format version {}",
                doc.format_version
            )));
        }
        if doc.n_train != train.n() || doc.p != train.p() {
            return Err(Error::ModelDocument(format!(
                "document was fitted on {}x{} data, got {}x{}",
                doc.n_train,
                doc.p,
                train.n(),
                train.p()
            )));
        }
        let p_prime = doc.config.validate(train.n(), train.p())?;
        if doc.samples.len() != doc.config.ensemble_size {
            return Err(Error::ModelDocument(format!(
                "{} samples for ensemble size {}",
                doc.samples.len(),
                doc.config.ensemble_size
            )));
        }
        for s in &doc.samples {
            if s.feature_indices.len() != p_prime
                || s.feature_indices.iter().any(|&j| j >= train.p())
                || s.row_indices.iter().any(|&i| i >= train.n())
            {
                return Err(Error::ModelDocument("sample indices out of range".into()));
            }
        }
        Ok(Self {
            train,
            config: doc.config,
            samples: doc.samples,
        })
    }

    pub fn from_json(train: &'a Dataset, json: &str) -> Result<Self> {
        let doc: ModelDocument =
            serde_json::from_str(json).map_err(|e| Error::ModelDocument(e.to_string()))?;
        Self::from_document(train, doc)
    }
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Serialized form of a fitted model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    pub n_train: usize,
    pub p: usize,
    pub config: ExNRuleConfig,
    pub samples: Vec<BaseLearnerSample>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_dataset(values: &[(f64, u8)]) -> Dataset {
        let rows: Vec<Vec<f64>> = values.iter().map(|&(x, _)| vec![x]).collect();
        let labels: Vec<u8> = values.iter().map(|&(_, y)| y).collect();
        Dataset::new(
            Matrix::from_rows(rows).unwrap(),
            labels,
            vec!["f1".into()],
        )
        .unwrap()
    }

    fn grid_dataset(n: usize, p: usize, seed: u64) -> Dataset {
        let mut rng = RngStream::new(seed, 1000);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.index(10) as f64).collect())
            .collect();
        let mut labels: Vec<u8> = (0..n).map(|_| (rng.next_u64() & 1) as u8).collect();
        labels[0] = 0;
        labels[1] = 1; // both classes present
        Dataset::new(
            Matrix::from_rows(rows).unwrap(),
            labels,
            (0..p).map(|j| format!("f{j}")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn fit_resolves_sqrt_p_subsets() {
        let data = grid_dataset(30, 16, 1);
        let config = ExNRuleConfig {
            ensemble_size: 500,
            ..ExNRuleConfig::new(7)
        };
        let model = fit(&data, config).unwrap();
        assert_eq!(model.samples().len(), 500);
        assert!(model.samples().iter().all(|s| s.feature_indices.len() == 4));
    }

    #[test]
    fn fit_without_bootstrap_full_features_is_identity_sample() {
        let data = grid_dataset(12, 3, 2);
        let config = ExNRuleConfig {
            ensemble_size: 1,
            feature_rule: FeatureRule::Fixed(3),
            bootstrap: false,
            ..ExNRuleConfig::new(7)
        };
        let model = fit(&data, config).unwrap();
        let s = &model.samples()[0];
        assert_eq!(s.row_indices, (0..12).collect::<Vec<_>>());
        assert_eq!(s.feature_indices, vec![0, 1, 2]);
    }

    #[test]
    fn fit_is_deterministic_in_the_master_seed() {
        let data = grid_dataset(20, 6, 3);
        let config = ExNRuleConfig {
            ensemble_size: 50,
            ..ExNRuleConfig::new(99)
        };
        let a = fit(&data, config).unwrap();
        let b = fit(&data, config).unwrap();
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn fit_rejects_single_class() {
        let data = line_dataset(&[(0.0, 1), (1.0, 1), (2.0, 1)]);
        assert!(matches!(
            fit(&data, ExNRuleConfig::new(0)),
            Err(Error::SingleClassTraining)
        ));
    }

    #[test]
    fn fit_rejects_overlong_chain() {
        let data = line_dataset(&[(0.0, 0), (1.0, 1)]);
        let config = ExNRuleConfig {
            chain_length: 3,
            ..ExNRuleConfig::new(0)
        };
        assert!(matches!(fit(&data, config), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn chain_walks_the_line_not_the_sphere() {
        // Pool {1, 2, 10}; from query 0 the second hop measures from 1, so
        // it reaches 2 at distance 1 rather than measuring from the query.
        let data = line_dataset(&[(1.0, 0), (2.0, 0), (10.0, 1)]);
        let sample = BaseLearnerSample {
            row_indices: vec![0, 1, 2],
            feature_indices: vec![0],
        };
        let chain =
            extended_chain(&sample, &data, &[0.0], 2, DistanceMetric::euclidean()).unwrap();
        assert_eq!(chain.row_indices, vec![0, 1]);
        assert_eq!(chain.labels, vec![0, 0]);
        assert_eq!(chain.hop_distances, vec![1.0, 1.0]);
    }

    #[test]
    fn chain_of_one_is_nearest_neighbour() {
        let data = line_dataset(&[(5.0, 0), (2.0, 1), (8.0, 0)]);
        let sample = BaseLearnerSample {
            row_indices: vec![0, 1, 2],
            feature_indices: vec![0],
        };
        let chain =
            extended_chain(&sample, &data, &[1.0], 1, DistanceMetric::euclidean()).unwrap();
        assert_eq!(chain.row_indices, vec![1]);
        assert_eq!(chain.labels, vec![1]);
    }

    #[test]
    fn full_length_chain_visits_every_pool_entry_once() {
        let data = grid_dataset(9, 2, 5);
        let sample = BaseLearnerSample {
            row_indices: vec![3, 1, 4, 1, 5], // duplicated entry 1
            feature_indices: vec![0, 1],
        };
        let chain =
            extended_chain(&sample, &data, &[0.0, 0.0], 5, DistanceMetric::euclidean()).unwrap();
        let mut positions = chain.pool_positions.clone();
        positions.sort_unstable();
        assert_eq!(positions, vec![0, 1, 2, 3, 4]);
        // The duplicated training row occupies two hops.
        assert_eq!(
            chain.row_indices.iter().filter(|&&r| r == 1).count(),
            2
        );
    }

    #[test]
    fn chain_exhausted_error() {
        let data = line_dataset(&[(0.0, 0), (1.0, 1)]);
        let sample = BaseLearnerSample {
            row_indices: vec![0, 1],
            feature_indices: vec![0],
        };
        assert!(matches!(
            extended_chain(&sample, &data, &[0.0], 3, DistanceMetric::euclidean()),
            Err(Error::ChainExhausted { requested: 3, pool: 2 })
        ));
    }

    fn chain_with_labels(labels: &[u8]) -> ChainResult {
        ChainResult {
            pool_positions: (0..labels.len()).collect(),
            row_indices: (0..labels.len()).collect(),
            labels: labels.to_vec(),
            hop_distances: vec![1.0; labels.len()],
        }
    }

    #[test]
    fn base_vote_simple_majority() {
        assert_eq!(base_predict(&chain_with_labels(&[0, 1, 1])), (1, 2.0 / 3.0));
    }

    #[test]
    fn base_vote_unanimous_probability_one() {
        assert_eq!(base_predict(&chain_with_labels(&[1, 1, 1, 1])), (1, 1.0));
        assert_eq!(base_predict(&chain_with_labels(&[0, 0])), (0, 0.0));
    }

    #[test]
    fn base_vote_tie_takes_first_hop() {
        assert_eq!(base_predict(&chain_with_labels(&[0, 1])), (0, 0.5));
        assert_eq!(base_predict(&chain_with_labels(&[1, 0])), (1, 0.5));
    }

    #[test]
    fn ensemble_vote_tie_prefers_higher_mean_probability_then_zero() {
        assert_eq!(ensemble_vote(&[0, 1], &[0.5, 1.0]), (1, 0.75));
        assert_eq!(ensemble_vote(&[0, 1], &[0.0, 0.5]), (0, 0.25));
        assert_eq!(ensemble_vote(&[0, 1], &[0.5, 0.5]), (0, 0.5));
        assert_eq!(ensemble_vote(&[1, 1, 0], &[1.0, 0.5, 0.25]), (1, 1.75 / 3.0));
    }

    #[test]
    fn single_learner_prediction_equals_base_vote() {
        let data = line_dataset(&[(1.0, 0), (2.0, 0), (10.0, 1)]);
        let config = ExNRuleConfig {
            ensemble_size: 1,
            chain_length: 2,
            feature_rule: FeatureRule::Fixed(1),
            bootstrap: false,
            ..ExNRuleConfig::new(3)
        };
        let model = fit(&data, config).unwrap();
        let pred = model.predict(&[0.0]).unwrap();
        assert_eq!(pred.label, 0);
        assert_eq!(pred.prob_class1, 0.0);
        assert_eq!(pred.per_base_votes, Some(vec![0]));
    }

    #[test]
    fn consensus_when_all_learners_agree() {
        let data = line_dataset(&[(0.0, 0), (0.5, 0), (9.0, 1), (9.5, 1)]);
        let config = ExNRuleConfig {
            ensemble_size: 32,
            chain_length: 1,
            feature_rule: FeatureRule::Fixed(1),
            ..ExNRuleConfig::new(11)
        };
        let model = fit(&data, config).unwrap();
        let pred = model.predict(&[9.2]).unwrap();
        assert_eq!(pred.label, 1);
        let votes = pred.per_base_votes.unwrap();
        assert!(votes.iter().all(|&v| v == 1));
        assert_eq!(pred.prob_class1, 1.0);
    }

    #[test]
    fn ensemble_probability_is_mean_of_base_probabilities() {
        let data = grid_dataset(25, 4, 8);
        let config = ExNRuleConfig {
            ensemble_size: 64,
            ..ExNRuleConfig::new(21)
        };
        let model = fit(&data, config).unwrap();
        let query = vec![4.0, 4.0, 4.0, 4.0];
        let pred = model.predict(&query).unwrap();
        // Recompute the mean from the individual chains.
        let mut total = 0.0;
        for sample in model.samples() {
            let projected: Vec<f64> = sample.feature_indices.iter().map(|&j| query[j]).collect();
            let chain = extended_chain(sample, &data, &projected, 3, model.config().metric).unwrap();
            total += base_predict(&chain).1;
        }
        assert!((pred.prob_class1 - total / 64.0).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&pred.prob_class1));
    }

    #[test]
    fn prediction_rejects_wrong_dimension() {
        let data = grid_dataset(10, 3, 9);
        let model = fit(
            &data,
            ExNRuleConfig {
                ensemble_size: 2,
                ..ExNRuleConfig::new(0)
            },
        )
        .unwrap();
        assert!(matches!(
            model.predict(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn batch_of_one_equals_predict() {
        let data = grid_dataset(15, 3, 10);
        let model = fit(
            &data,
            ExNRuleConfig {
                ensemble_size: 16,
                ..ExNRuleConfig::new(5)
            },
        )
        .unwrap();
        let q = Matrix::from_rows(vec![vec![3.0, 3.0, 3.0]]).unwrap();
        let batch = model.predict_batch(&q).unwrap();
        assert_eq!(batch.len(), 1);
        assert_eq!(batch[0], model.predict(&[3.0, 3.0, 3.0]).unwrap());
    }

    #[test]
    fn batch_permutation_permutes_outputs() {
        let data = grid_dataset(20, 3, 11);
        let model = fit(
            &data,
            ExNRuleConfig {
                ensemble_size: 8,
                ..ExNRuleConfig::new(5)
            },
        )
        .unwrap();
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 2.0, 5.0]).collect();
        let fwd = model
            .predict_batch(&Matrix::from_rows(rows.clone()).unwrap())
            .unwrap();
        let rev_rows: Vec<Vec<f64>> = rows.iter().rev().cloned().collect();
        let rev = model
            .predict_batch(&Matrix::from_rows(rev_rows).unwrap())
            .unwrap();
        let fwd_rev: Vec<_> = fwd.into_iter().rev().collect();
        assert_eq!(fwd_rev, rev);
    }

    #[test]
    fn model_document_round_trip() {
        let data = grid_dataset(18, 4, 12);
        let model = fit(
            &data,
            ExNRuleConfig {
                ensemble_size: 12,
                ..ExNRuleConfig::new(77)
            },
        )
        .unwrap();
        let json = model.to_json();
        let restored = ExNRuleModel::from_json(&data, &json).unwrap();
        assert_eq!(restored.samples(), model.samples());
        let q = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(restored.predict(&q).unwrap(), model.predict(&q).unwrap());
    }

    #[test]
    fn model_document_rejects_mismatched_data() {
        let data = grid_dataset(18, 4, 12);
        let other = grid_dataset(17, 4, 13);
        let model = fit(
            &data,
            ExNRuleConfig {
                ensemble_size: 4,
                ..ExNRuleConfig::new(77)
            },
        )
        .unwrap();
        let json = model.to_json();
        assert!(matches!(
            ExNRuleModel::from_json(&other, &json),
            Err(Error::ModelDocument(_))
        ));
    }
}
