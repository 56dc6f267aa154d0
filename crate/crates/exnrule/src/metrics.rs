//! Classification metrics: accuracy, Cohen's kappa and the Brier score.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

fn check_labels(pred: &[u8], truth: &[u8]) -> Result<()> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(Error::LengthMismatch(pred.len(), truth.len()));
    }
    if let Some(&bad) = pred.iter().chain(truth.iter()).find(|&&y| y > 1) {
        return Err(Error::NonBinaryLabel(format!("label value {bad}")));
    }
    Ok(())
}

/// Fraction of exact label matches.
pub fn accuracy(pred_labels: &[u8], true_labels: &[u8]) -> Result<f64> {
    check_labels(pred_labels, true_labels)?;
    let hits = pred_labels
        .iter()
        .zip(true_labels)
        .filter(|(a, b)| a == b)
        .count();
    Ok(hits as f64 / pred_labels.len() as f64)
}

/// Chance-corrected agreement (p_o - p_e) / (1 - p_e).
///
/// When both vectors are constant and equal, p_e = 1 and the score is 1 by
/// convention. When both are constant but different the formula itself
/// yields 0.
pub fn cohen_kappa(pred_labels: &[u8], true_labels: &[u8]) -> Result<f64> {
    check_labels(pred_labels, true_labels)?;
    let n = pred_labels.len() as f64;
    let pred_ones = pred_labels.iter().filter(|&&y| y == 1).count() as f64;
    let true_ones = true_labels.iter().filter(|&&y| y == 1).count() as f64;
    let p_o = accuracy(pred_labels, true_labels)?;
    let p_e = (pred_ones * true_ones + (n - pred_ones) * (n - true_ones)) / (n * n);
    if p_e == 1.0 {
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Mean squared difference between the class-1 probability and the outcome.
/// Single-probability binary form, so the range is [0, 1]; lower is better.
pub fn brier_score(prob_class1: &[f64], true_labels: &[u8]) -> Result<f64> {
    if prob_class1.len() != true_labels.len() || prob_class1.is_empty() {
        return Err(Error::LengthMismatch(prob_class1.len(), true_labels.len()));
    }
    if let Some(&bad) = true_labels.iter().find(|&&y| y > 1) {
        return Err(Error::NonBinaryLabel(format!("label value {bad}")));
    }
    if let Some(&bad) = prob_class1.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::ProbOutOfRange(bad));
    }
    let sum: f64 = prob_class1
        .iter()
        .zip(true_labels)
        .map(|(p, &y)| (p - y as f64).powi(2))
        .sum();
    Ok(sum / prob_class1.len() as f64)
}

/// The three reported measures, as a selector for table and plot tooling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Accuracy,
    Kappa,
    Brier,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Accuracy, MetricKind::Kappa, MetricKind::Brier];

    pub fn of(&self, record: &EvalRecord) -> f64 {
        match self {
            MetricKind::Accuracy => record.accuracy,
            MetricKind::Kappa => record.kappa,
            MetricKind::Brier => record.brier,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Accuracy => "accuracy",
            MetricKind::Kappa => "kappa",
            MetricKind::Brier => "brier",
        })
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "accuracy" => Ok(MetricKind::Accuracy),
            "kappa" => Ok(MetricKind::Kappa),
            "brier" => Ok(MetricKind::Brier),
            other => Err(Error::UnknownMetric(other.into())),
        }
    }
}

/// One method's scores on one repetition of one dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    pub method: String,
    pub dataset: String,
    pub repetition: usize,
    pub k_used: usize,
    pub accuracy: f64,
    pub kappa: f64,
    pub brier: f64,
}

impl EvalRecord {
    /// Validates the metric ranges at construction.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        method: impl Into<String>,
        dataset: impl Into<String>,
        repetition: usize,
        k_used: usize,
        accuracy: f64,
        kappa: f64,
        brier: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&accuracy) {
            return Err(Error::ProbOutOfRange(accuracy));
        }
        if !(-1.0..=1.0).contains(&kappa) {
            return Err(Error::ConfigInvalid(format!("kappa {kappa} outside [-1, 1]")));
        }
        if !(0.0..=1.0).contains(&brier) {
            return Err(Error::ProbOutOfRange(brier));
        }
        Ok(Self {
            method: method.into(),
            dataset: dataset.into(),
            repetition,
            k_used,
            accuracy,
            kappa,
            brier,
        })
    }
}
