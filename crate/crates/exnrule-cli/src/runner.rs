//! Experiment driver: repeated splits, method dispatch, deterministic
//! randomness addressing and result emission.
//!
//! Randomness is addressed by `(master_seed, stream_id)` where the stream
//! id packs `(dataset index << 40) | (repetition << 16) | purpose`:
//!
//! * purpose 0: scenario regeneration for this repetition;
//! * purpose 1: the train/test shuffle;
//! * purpose 16 + m: the k tuner for method m;
//! * purpose 1024 + m * 64 + j: fitting method m at the j-th k value.
//!
//! Fit streams only derive a fresh 64-bit sub-seed (their first output),
//! which the classifier then splits per learner. Every task therefore owns
//! disjoint streams, so the (dataset x repetition) grid can run on any
//! number of threads and still reproduce a serial run byte for byte.
//!
//! Scenario datasets are regenerated per repetition; CSV datasets are
//! loaded once and only the split varies. With `--tune`, each kNN-family
//! baseline picks its k per (dataset, repetition) by 5-fold cross-
//! validation over k = 1..=10, while the extended-rule ensemble keeps the
//! configured k values.

use rayon::prelude::*;

use exnrule::baselines::{
    knn_predict, rknn_fit, rknn_predict, tune_k, wknn_predict, KnnConfig, KnnFamilyConfig,
    RknnConfig,
};
use exnrule::dataset::{load_csv, train_test_split_indices, Standardizer};
use exnrule::metrics::{accuracy, brier_score, cohen_kappa, EvalRecord, MetricKind};
use exnrule::synthgen::{generate, spec_for, ScenarioSpec};
use exnrule::{Dataset, ExNRuleConfig, RngStream};

use crate::boxplot::emit_boxplot_data;
use crate::config::{DatasetSource, ExperimentConfig, Method};
use crate::error::{CliError, Result};
use crate::results::{partition_hash, write_results_csv, write_summary_csv, ResultRow, ResultsTable};

const PURPOSE_GENERATE: u64 = 0;
const PURPOSE_SPLIT: u64 = 1;
const PURPOSE_TUNE_BASE: u64 = 16;
const PURPOSE_FIT_BASE: u64 = 1024;
const FIT_SLOTS_PER_METHOD: u64 = 64;

/// Packs a task-local stream address.
fn stream_id(dataset: usize, repetition: usize, purpose: u64) -> u64 {
    debug_assert!(dataset < (1 << 24) && repetition < (1 << 24) && purpose < (1 << 16));
    ((dataset as u64) << 40) | ((repetition as u64) << 16) | purpose
}

/// A dataset source resolved to something a task can draw from.
enum Materialized {
    Scenario(ScenarioSpec),
    Loaded(Dataset),
}

impl Materialized {
    fn for_repetition(&self, seed: u64, dataset: usize, repetition: usize) -> Result<Dataset> {
        match self {
            Materialized::Scenario(spec) => {
                let mut rng = RngStream::new(seed, stream_id(dataset, repetition, PURPOSE_GENERATE));
                Ok(generate(spec, &mut rng)?)
            }
            Materialized::Loaded(data) => Ok(data.clone()),
        }
    }
}

fn evaluate_method(
    method: Method,
    train: &Dataset,
    test: &Dataset,
    k: usize,
    ensemble_size: usize,
    fit_seed: u64,
) -> Result<(Vec<u8>, Vec<f64>)> {
    let mut labels = Vec::with_capacity(test.n());
    let mut probs = Vec::with_capacity(test.n());
    match method {
        Method::ExNRule => {
            let config = ExNRuleConfig {
                ensemble_size,
                chain_length: k,
                ..ExNRuleConfig::new(fit_seed)
            };
            let model = exnrule::fit(train, config)?;
            for pred in model.predict_batch(test.features())? {
                labels.push(pred.label);
                probs.push(pred.prob_class1);
            }
        }
        Method::Knn | Method::Wknn => {
            let config = KnnConfig::new(k);
            for i in 0..test.n() {
                let (label, prob) = if method == Method::Knn {
                    knn_predict(train, test.row(i), &config)?
                } else {
                    wknn_predict(train, test.row(i), &config)?
                };
                labels.push(label);
                probs.push(prob);
            }
        }
        Method::Rknn => {
            let config = RknnConfig {
                ensemble_size,
                k,
                ..RknnConfig::new(fit_seed)
            };
            let model = rknn_fit(train, config)?;
            for i in 0..test.n() {
                let (label, prob) = rknn_predict(&model, test.row(i))?;
                labels.push(label);
                probs.push(prob);
            }
        }
    }
    Ok((labels, probs))
}

fn run_task(
    config: &ExperimentConfig,
    source: &Materialized,
    name: &str,
    dataset: usize,
    repetition: usize,
) -> Result<Vec<ResultRow>> {
    let seed = config.master_seed;
    let data = source.for_repetition(seed, dataset, repetition)?;
    let mut split_rng = RngStream::new(seed, stream_id(dataset, repetition, PURPOSE_SPLIT));
    let split = train_test_split_indices(&data, config.train_fraction, &mut split_rng)?;
    let mut train = data.subset(&split.train)?;
    let mut test = data.subset(&split.test)?;
    if config.scale {
        let standardizer = Standardizer::fit(&train);
        train = standardizer.transform(&train)?;
        test = standardizer.transform(&test)?;
    }
    let split_digest = partition_hash(&split);

    let mut rows = Vec::new();
    for (mi, &method) in config.methods.iter().enumerate() {
        let ks: Vec<usize> = if config.tune && method != Method::ExNRule {
            let mut tune_rng = RngStream::new(
                seed,
                stream_id(dataset, repetition, PURPOSE_TUNE_BASE + mi as u64),
            );
            let learner = match method {
                Method::Knn => KnnFamilyConfig::Knn(KnnConfig::new(3)),
                Method::Wknn => KnnFamilyConfig::Wknn(KnnConfig::new(3)),
                Method::Rknn => KnnFamilyConfig::Rknn(RknnConfig {
                    ensemble_size: config.ensemble_size,
                    ..RknnConfig::new(0)
                }),
                Method::ExNRule => unreachable!("extended rule is not tuned"),
            };
            let grid: Vec<usize> = (1..=10).collect();
            vec![tune_k(&train, &grid, 5, &learner, &mut tune_rng)?]
        } else {
            config.k_values.clone()
        };

        for (ki, &k) in ks.iter().enumerate() {
            let purpose = PURPOSE_FIT_BASE + mi as u64 * FIT_SLOTS_PER_METHOD + ki as u64;
            let fit_seed =
                RngStream::new(seed, stream_id(dataset, repetition, purpose)).next_u64();
            let (pred_labels, pred_probs) =
                evaluate_method(method, &train, &test, k, config.ensemble_size, fit_seed)?;
            let record = EvalRecord::new(
                method.to_string(),
                name,
                repetition,
                k,
                accuracy(&pred_labels, test.labels())?,
                cohen_kappa(&pred_labels, test.labels())?,
                brier_score(&pred_probs, test.labels())?,
            )?;
            rows.push(ResultRow {
                record,
                partition_hash: split_digest.clone(),
            });
        }
    }
    Ok(rows)
}

/// Runs the full (dataset x repetition) grid and writes `results.csv`,
/// `summary.csv` and one boxplot TSV per metric into the output directory.
///
/// Repetition tasks run in parallel; each failure aborts the run with the
/// underlying error rather than skipping silently.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultsTable> {
    config.validate()?;
    if config.datasets.len() >= (1 << 24) || config.repetitions >= (1 << 24) {
        return Err(CliError::Config("grid too large to address".into()));
    }

    let sources: Vec<(String, Materialized)> = config
        .datasets
        .iter()
        .map(|source| -> Result<_> {
            match source {
                DatasetSource::Scenario(id) => {
                    Ok((id.to_string(), Materialized::Scenario(spec_for(*id))))
                }
                DatasetSource::Csv { name, path } => {
                    let data = load_csv(path, None)?;
                    Ok((name.clone(), Materialized::Loaded(data)))
                }
            }
        })
        .collect::<Result<_>>()?;

    let tasks: Vec<(usize, usize)> = (0..sources.len())
        .flat_map(|d| (0..config.repetitions).map(move |r| (d, r)))
        .collect();

    let rows: Vec<Vec<ResultRow>> = tasks
        .par_iter()
        .map(|&(d, r)| {
            let (name, source) = &sources[d];
            run_task(config, source, name, d, r)
        })
        .collect::<Result<_>>()?;
    let table = ResultsTable::new(rows.into_iter().flatten().collect());

    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| CliError::io(config.output_dir.clone(), e))?;
    let hash = config.config_hash();
    write_results_csv(
        &table,
        config.master_seed,
        &hash,
        config.output_dir.join("results.csv"),
    )?;
    write_summary_csv(
        &table,
        config.master_seed,
        &hash,
        config.output_dir.join("summary.csv"),
    )?;
    for metric in MetricKind::ALL {
        emit_boxplot_data(
            &table,
            metric,
            config.master_seed,
            &hash,
            config.output_dir.join(format!("boxplot_{metric}.tsv")),
        )?;
    }
    Ok(table)
}
