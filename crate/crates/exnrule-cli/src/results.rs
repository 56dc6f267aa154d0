//! Long-form results, aggregates, and their CSV encodings.
//!
//! Output files start with a metadata block of '#' comment lines (version,
//! seed, config hash) so every artifact names the run that produced it.

use std::fmt::Write as _;
use std::path::Path;

use exnrule::dataset::SplitIndices;
use exnrule::metrics::EvalRecord;

use crate::error::{CliError, Result};

/// FNV-1a 64-bit hash; stable across platforms and releases.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Digest of one train/test partition. Every method evaluated within a
/// repetition stores the same hash, proving it saw the same split.
pub fn partition_hash(split: &SplitIndices) -> String {
    let mut bytes = Vec::with_capacity(8 * (split.train.len() + split.test.len() + 1));
    for &i in &split.train {
        bytes.extend_from_slice(&(i as u64).to_le_bytes());
    }
    bytes.extend_from_slice(&u64::MAX.to_le_bytes());
    for &i in &split.test {
        bytes.extend_from_slice(&(i as u64).to_le_bytes());
    }
    format!("{:016x}", fnv1a64(&bytes))
}

/// One scored (method, dataset, k, repetition) cell plus its split digest.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub record: EvalRecord,
    pub partition_hash: String,
}

/// Mean metrics over the repetitions of one (method, dataset, k) group.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub method: String,
    pub dataset: String,
    pub k: usize,
    pub repetitions: usize,
    pub mean_accuracy: f64,
    pub mean_kappa: f64,
    pub mean_brier: f64,
}

/// All rows of one experiment, sorted by (method, dataset, k, repetition).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
}

impl ResultsTable {
    pub fn new(mut rows: Vec<ResultRow>) -> Self {
        rows.sort_by(|a, b| {
            (&a.record.method, &a.record.dataset, a.record.k_used, a.record.repetition).cmp(&(
                &b.record.method,
                &b.record.dataset,
                b.record.k_used,
                b.record.repetition,
            ))
        });
        Self { rows }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Aggregates into per-(method, dataset, k) arithmetic means, in row
    /// order.
    pub fn summarize(&self) -> Vec<SummaryRow> {
        let mut out: Vec<SummaryRow> = Vec::new();
        for row in &self.rows {
            let r = &row.record;
            match out.last_mut() {
                Some(s) if s.method == r.method && s.dataset == r.dataset && s.k == r.k_used => {
                    s.repetitions += 1;
                    s.mean_accuracy += r.accuracy;
                    s.mean_kappa += r.kappa;
                    s.mean_brier += r.brier;
                }
                _ => out.push(SummaryRow {
                    method: r.method.clone(),
                    dataset: r.dataset.clone(),
                    k: r.k_used,
                    repetitions: 1,
                    mean_accuracy: r.accuracy,
                    mean_kappa: r.kappa,
                    mean_brier: r.brier,
                }),
            }
        }
        for s in &mut out {
            let n = s.repetitions as f64;
            s.mean_accuracy /= n;
            s.mean_kappa /= n;
            s.mean_brier /= n;
        }
        out
    }

    /// Mean of one metric for a (method, dataset, k) group, when present.
    pub fn mean_of(&self, method: &str, dataset: &str, k: usize) -> Option<SummaryRow> {
        self.summarize()
            .into_iter()
            .find(|s| s.method == method && s.dataset == dataset && s.k == k)
    }
}

/// The '#'-prefixed header block stamped on every output file.
pub fn metadata_block(seed: u64, config_hash: &str) -> String {
    format!(
        "# version = {}\n# seed = {seed}\n# config_hash = {config_hash}\n",
        env!("CARGO_PKG_VERSION")
    )
}

/// Writes the long-form results file.
pub fn write_results_csv(
    table: &ResultsTable,
    seed: u64,
    config_hash: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = metadata_block(seed, config_hash);
    out.push_str("method,dataset,k,repetition,partition_hash,accuracy,kappa,brier\n");
    for row in &table.rows {
        let r = &row.record;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.method, r.dataset, r.k_used, r.repetition, row.partition_hash, r.accuracy, r.kappa, r.brier
        );
    }
    std::fs::write(path.as_ref(), out).map_err(|e| CliError::io(path.as_ref().to_path_buf(), e))
}

/// Writes the aggregate file.
pub fn write_summary_csv(
    table: &ResultsTable,
    seed: u64,
    config_hash: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = metadata_block(seed, config_hash);
    out.push_str("method,dataset,k,repetitions,mean_accuracy,mean_kappa,mean_brier\n");
    for s in table.summarize() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.method, s.dataset, s.k, s.repetitions, s.mean_accuracy, s.mean_kappa, s.mean_brier
        );
    }
    std::fs::write(path.as_ref(), out).map_err(|e| CliError::io(path.as_ref().to_path_buf(), e))
}

/// Reads a results file written by [`write_results_csv`], skipping the
/// metadata block.
pub fn read_results_csv(path: impl AsRef<Path>) -> Result<ResultsTable> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Results(format!("{}: {e}", path.display())))?;
    let expected = [
        "method",
        "dataset",
        "k",
        "repetition",
        "partition_hash",
        "accuracy",
        "kappa",
        "brier",
    ];
    let headers = reader
        .headers()
        .map_err(|e| CliError::Results(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::Results(format!(
            "{}: unexpected header '{}'",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Results(e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let parse_f = |i: usize| -> Result<f64> {
            field(i)
                .parse()
                .map_err(|_| CliError::Results(format!("bad number '{}'", field(i))))
        };
        let parse_u = |i: usize| -> Result<usize> {
            field(i)
                .parse()
                .map_err(|_| CliError::Results(format!("bad count '{}'", field(i))))
        };
        rows.push(ResultRow {
            record: EvalRecord::new(
                field(0),
                field(1),
                parse_u(3)?,
                parse_u(2)?,
                parse_f(5)?,
                parse_f(6)?,
                parse_f(7)?,
            )
            .map_err(CliError::Core)?,
            partition_hash: field(4).to_string(),
        });
    }
    Ok(ResultsTable::new(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(method: &str, dataset: &str, k: usize, rep: usize, acc: f64) -> ResultRow {
        ResultRow {
            record: EvalRecord::new(method, dataset, rep, k, acc, 0.0, 0.25).unwrap(),
            partition_hash: format!("{rep:016x}"),
        }
    }

    #[test]
    fn fnv_matches_known_vectors() {
        // Standard FNV-1a test vectors.
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn partition_hash_separates_train_from_test() {
        let a = SplitIndices {
            train: vec![0, 1],
            test: vec![2],
        };
        let b = SplitIndices {
            train: vec![0],
            test: vec![1, 2],
        };
        assert_ne!(partition_hash(&a), partition_hash(&b));
        assert_eq!(partition_hash(&a), partition_hash(&a.clone()));
    }

    #[test]
    fn summarize_means_per_group() {
        let table = ResultsTable::new(vec![
            row("knn", "S1", 3, 0, 0.8),
            row("knn", "S1", 3, 1, 0.6),
            row("exnrule", "S1", 3, 0, 1.0),
        ]);
        let summary = table.summarize();
        assert_eq!(summary.len(), 2);
        assert_eq!(summary[0].method, "exnrule");
        assert_eq!(summary[0].repetitions, 1);
        assert!((summary[1].mean_accuracy - 0.7).abs() < 1e-15);
    }

    #[test]
    fn results_csv_round_trip() {
        let table = ResultsTable::new(vec![
            row("knn", "S1", 3, 1, 0.625),
            row("knn", "S1", 3, 0, 0.8125),
        ]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        write_results_csv(&table, 7, "deadbeef", &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# version = "));
        assert!(text.contains("# seed = 7"));
        assert!(text.contains("# config_hash = deadbeef"));
        let back = read_results_csv(&path).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn read_rejects_foreign_headers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(matches!(
            read_results_csv(&path),
            Err(CliError::Results(_))
        ));
    }
}
