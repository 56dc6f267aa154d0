//! Boxplot artifacts: TSV shape and the SVG's agreement with quantiles
//! recomputed independently from the emitted TSV.

use exnrule::metrics::MetricKind;
use exnrule_cli::boxplot::{emit_boxplot_svg, metric_groups};
use exnrule_cli::config::ExperimentConfig;
use exnrule_cli::results::{ResultRow, ResultsTable};
use exnrule_cli::runner::run_experiment;

fn study_table(dir: &std::path::Path) -> ResultsTable {
    let mut config = ExperimentConfig::default();
    config.set("datasets", "S1").unwrap();
    config.repetitions = 50;
    config.ensemble_size = 20;
    config.master_seed = 5;
    config.output_dir = dir.join("out");
    run_experiment(&config).unwrap()
}

/// Plain reimplementation of linearly interpolated quantiles, used as the
/// oracle against the SVG's embedded statistics.
fn quantile_oracle(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = q * (values.len() as f64 - 1.0);
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < values.len() {
        values[lo] * (1.0 - frac) + values[lo + 1] * frac
    } else {
        values[lo]
    }
}

#[test]
fn tsv_is_one_column_per_group_one_row_per_repetition() {
    let dir = tempfile::tempdir().unwrap();
    study_table(dir.path());
    let text = std::fs::read_to_string(dir.path().join("out/boxplot_accuracy.tsv")).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap();
    assert_eq!(
        header.split('\t').collect::<Vec<_>>(),
        vec!["exnrule:S1", "knn:S1", "rknn:S1", "wknn:S1"]
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r.split('\t').count() == 4));
}

#[test]
fn svg_statistics_match_quantiles_recomputed_from_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let table = study_table(dir.path());
    let svg_path = dir.path().join("out/boxplot_kappa.svg");
    emit_boxplot_svg(&table, MetricKind::Kappa, 5, "hash", &svg_path).unwrap();

    // Columns from the TSV...
    let text = std::fs::read_to_string(dir.path().join("out/boxplot_kappa.tsv")).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let labels: Vec<String> = lines.next().unwrap().split('\t').map(String::from).collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
    for line in lines {
        for (c, field) in line.split('\t').enumerate() {
            columns[c].push(field.parse().unwrap());
        }
    }

    // ...against the data- attributes in the SVG.
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    let attr = |label: &str, name: &str| -> f64 {
        let group = svg
            .lines()
            .find(|l| l.contains(&format!("data-label=\"{label}\"")))
            .unwrap_or_else(|| panic!("no group for {label}"));
        let key = format!("{name}=\"");
        let start = group.find(&key).unwrap() + key.len();
        let end = group[start..].find('"').unwrap();
        group[start..start + end].parse().unwrap()
    };
    for (label, column) in labels.iter().zip(&mut columns) {
        for (name, q) in [("data-q1", 0.25), ("data-median", 0.5), ("data-q3", 0.75)] {
            let expected = quantile_oracle(column, q);
            let got = attr(label, name);
            // The oracle interpolates with a different (algebraically
            // equal) expression, so allow last-ulp noise.
            assert!(
                (got - expected).abs() <= 1e-12 * expected.abs().max(1.0),
                "{label} {name}: {got} vs {expected}"
            );
        }
    }
}

#[test]
fn constant_column_degenerates_without_crashing() {
    let rows: Vec<ResultRow> = (0..10)
        .map(|rep| ResultRow {
            record: exnrule::EvalRecord::new("knn", "S1", rep, 3, 0.8, 0.5, 0.25).unwrap(),
            partition_hash: "0".into(),
        })
        .collect();
    let table = ResultsTable::new(rows);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.svg");
    emit_boxplot_svg(&table, MetricKind::Accuracy, 0, "hash", &path).unwrap();
    let svg = std::fs::read_to_string(path).unwrap();
    assert!(svg.contains("data-q1=\"0.8\""));
    assert!(svg.contains("data-median=\"0.8\""));
    assert!(svg.contains("data-q3=\"0.8\""));

    let groups = metric_groups(&table, MetricKind::Accuracy);
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0].values.len(), 10);
}

#[test]
fn multi_k_tables_get_k_suffixed_groups() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::default();
    config.set("datasets", "S1").unwrap();
    config.set("methods", "knn").unwrap();
    config.repetitions = 3;
    config.k_values = vec![3, 5];
    config.master_seed = 6;
    config.output_dir = dir.path().join("out");
    let table = run_experiment(&config).unwrap();
    let groups = metric_groups(&table, MetricKind::Accuracy);
    let labels: Vec<_> = groups.iter().map(|g| g.label.as_str()).collect();
    assert_eq!(labels, vec!["knn:S1:k3", "knn:S1:k5"]);
}
