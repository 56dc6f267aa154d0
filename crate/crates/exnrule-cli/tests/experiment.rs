//! End-to-end runner behavior: cardinality, determinism, split identity
//! and aggregate consistency.

use std::collections::HashMap;
use std::path::PathBuf;

use exnrule_cli::config::{DatasetSource, ExperimentConfig, Method};
use exnrule_cli::results::read_results_csv;
use exnrule_cli::runner::run_experiment;

fn small_config(out: PathBuf) -> ExperimentConfig {
    let mut config = ExperimentConfig {
        repetitions: 4,
        ensemble_size: 40,
        master_seed: 77,
        output_dir: out,
        ..ExperimentConfig::default()
    };
    config.set("datasets", "S1,S2").unwrap();
    config
}

#[test]
fn single_cell_yields_single_record() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_config(dir.path().join("out"));
    config.set("datasets", "S3").unwrap();
    config.set("methods", "knn").unwrap();
    config.repetitions = 1;
    let table = run_experiment(&config).unwrap();
    assert_eq!(table.rows.len(), 1);
    let r = &table.rows[0].record;
    assert_eq!(r.method, "knn");
    assert_eq!(r.dataset, "S3");
    assert_eq!(r.repetition, 0);
    assert_eq!(r.k_used, 3);
}

#[test]
fn same_config_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_experiment(&small_config(dir.path().join("a"))).unwrap();
    let b = run_experiment(&small_config(dir.path().join("b"))).unwrap();
    assert_eq!(a, b);
    let bytes_a = std::fs::read(dir.path().join("a/results.csv")).unwrap();
    let bytes_b = std::fs::read(dir.path().join("b/results.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn every_method_sees_the_same_partition() {
    let dir = tempfile::tempdir().unwrap();
    let table = run_experiment(&small_config(dir.path().join("out"))).unwrap();
    // 2 datasets x 4 reps x 4 methods.
    assert_eq!(table.rows.len(), 32);
    let mut by_cell: HashMap<(String, usize), Vec<String>> = HashMap::new();
    for row in &table.rows {
        by_cell
            .entry((row.record.dataset.clone(), row.record.repetition))
            .or_default()
            .push(row.partition_hash.clone());
    }
    assert_eq!(by_cell.len(), 8);
    for ((dataset, rep), hashes) in by_cell {
        assert_eq!(hashes.len(), 4, "{dataset} rep {rep}");
        assert!(
            hashes.windows(2).all(|w| w[0] == w[1]),
            "{dataset} rep {rep}: methods saw different splits"
        );
    }
}

#[test]
fn summary_matches_recomputed_means_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path().join("out"));
    let table = run_experiment(&config).unwrap();
    let reloaded = read_results_csv(dir.path().join("out/results.csv")).unwrap();
    assert_eq!(reloaded, table);

    for s in table.summarize() {
        let group: Vec<_> = reloaded
            .rows
            .iter()
            .filter(|r| {
                r.record.method == s.method
                    && r.record.dataset == s.dataset
                    && r.record.k_used == s.k
            })
            .collect();
        assert_eq!(group.len(), s.repetitions);
        let mean = |f: fn(&exnrule::EvalRecord) -> f64| {
            group.iter().map(|r| f(&r.record)).sum::<f64>() / group.len() as f64
        };
        assert!((mean(|r| r.accuracy) - s.mean_accuracy).abs() < 1e-12);
        assert!((mean(|r| r.kappa) - s.mean_kappa).abs() < 1e-12);
        assert!((mean(|r| r.brier) - s.mean_brier).abs() < 1e-12);
    }
}

#[test]
fn csv_datasets_flow_through_the_runner() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("toy.csv");
    exnrule_cli::scenario::dump_scenario(exnrule::ScenarioId::S4, 3, &csv_path).unwrap();

    let mut config = small_config(dir.path().join("out"));
    config.datasets = vec![DatasetSource::Csv {
        name: "toy".into(),
        path: csv_path,
    }];
    config.methods = vec![Method::ExNRule];
    config.repetitions = 2;
    let table = run_experiment(&config).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert!(table.rows.iter().all(|r| r.record.dataset == "toy"));
    // A fixed CSV still gets a fresh split per repetition.
    assert_ne!(table.rows[0].partition_hash, table.rows[1].partition_hash);
}

#[test]
fn missing_dataset_aborts_with_named_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_config(dir.path().join("out"));
    config.datasets = vec![DatasetSource::Csv {
        name: "ghost".into(),
        path: dir.path().join("ghost.csv"),
    }];
    let err = run_experiment(&config).unwrap_err();
    assert!(err.to_string().contains("ghost.csv"), "{err}");
}

#[test]
fn tuned_baselines_pick_one_k_per_repetition() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_config(dir.path().join("out"));
    config.set("datasets", "S4").unwrap();
    config.set("methods", "exnrule,knn").unwrap();
    config.repetitions = 2;
    config.k_values = vec![3, 5];
    config.tune = true;
    let table = run_experiment(&config).unwrap();
    // The ensemble keeps both configured ks; the tuned baseline collapses
    // to one record per repetition with k from the tuning grid.
    let exn: Vec<_> = table.rows.iter().filter(|r| r.record.method == "exnrule").collect();
    let knn: Vec<_> = table.rows.iter().filter(|r| r.record.method == "knn").collect();
    assert_eq!(exn.len(), 4);
    assert_eq!(knn.len(), 2);
    assert!(knn.iter().all(|r| (1..=10).contains(&r.record.k_used)));
}
