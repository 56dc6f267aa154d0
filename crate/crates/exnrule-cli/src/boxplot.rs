//! Boxplot-ready data files and a minimal SVG renderer.
//!
//! Quantiles use linear interpolation between order statistics (the type-7
//! convention), so TSV consumers can reproduce the drawn boxes exactly.

use std::fmt::Write as _;
use std::path::Path;

use exnrule::metrics::MetricKind;

use crate::error::{CliError, Result};
use crate::results::{metadata_block, ResultsTable};

/// Type-7 quantile of an ascending-sorted sample.
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty() && (0.0..=1.0).contains(&q));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = sorted.len() - 1;
    if lo == hi {
        return sorted[lo];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

/// Five-number summary with Tukey whiskers (1.5 IQR) and outliers.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

impl BoxStats {
    pub fn from_samples(samples: &[f64]) -> Self {
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q1 = quantile_type7(&sorted, 0.25);
        let median = quantile_type7(&sorted, 0.5);
        let q3 = quantile_type7(&sorted, 0.75);
        let iqr = q3 - q1;
        let lo_fence = q1 - 1.5 * iqr;
        let hi_fence = q3 + 1.5 * iqr;
        let whisker_low = sorted
            .iter()
            .copied()
            .find(|&x| x >= lo_fence)
            .unwrap_or(q1);
        let whisker_high = sorted
            .iter()
            .rev()
            .copied()
            .find(|&x| x <= hi_fence)
            .unwrap_or(q3);
        let outliers = sorted
            .iter()
            .copied()
            .filter(|&x| x < lo_fence || x > hi_fence)
            .collect();
        Self {
            q1,
            median,
            q3,
            whisker_low,
            whisker_high,
            outliers,
        }
    }
}

/// One boxplot column: every repetition of a (method, dataset, k) group.
#[derive(Clone, Debug)]
pub struct MetricGroup {
    pub label: String,
    pub values: Vec<f64>,
}

/// Collects per-group metric series in table order (repetition-sorted).
/// The k suffix appears only when the table spans several k values.
pub fn metric_groups(table: &ResultsTable, metric: MetricKind) -> Vec<MetricGroup> {
    let mut ks: Vec<usize> = table.rows.iter().map(|r| r.record.k_used).collect();
    ks.sort_unstable();
    ks.dedup();
    let multi_k = ks.len() > 1;

    let mut groups: Vec<MetricGroup> = Vec::new();
    let mut current_key: Option<(String, String, usize)> = None;
    for row in &table.rows {
        let r = &row.record;
        let key = (r.method.clone(), r.dataset.clone(), r.k_used);
        if current_key.as_ref() != Some(&key) {
            let label = if multi_k {
                format!("{}:{}:k{}", r.method, r.dataset, r.k_used)
            } else {
                format!("{}:{}", r.method, r.dataset)
            };
            groups.push(MetricGroup {
                label,
                values: Vec::new(),
            });
            current_key = Some(key);
        }
        groups.last_mut().unwrap().values.push(metric.of(r));
    }
    groups
}

/// Writes the TSV behind a boxplot: one column per (method, dataset) group,
/// one row per repetition, under the usual metadata block.
pub fn emit_boxplot_data(
    table: &ResultsTable,
    metric: MetricKind,
    seed: u64,
    config_hash: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    let groups = metric_groups(table, metric);
    if groups.is_empty() {
        return Err(CliError::Results("no rows to plot".into()));
    }
    let rows = groups.iter().map(|g| g.values.len()).max().unwrap();
    let mut out = metadata_block(seed, config_hash);
    let _ = writeln!(out, "# metric = {metric}");
    out.push_str(
        &groups
            .iter()
            .map(|g| g.label.clone())
            .collect::<Vec<_>>()
            .join("\t"),
    );
    out.push('\n');
    for i in 0..rows {
        let line: Vec<String> = groups
            .iter()
            .map(|g| g.values.get(i).map_or(String::new(), f64::to_string))
            .collect();
        out.push_str(&line.join("\t"));
        out.push('\n');
    }
    std::fs::write(path.as_ref(), out).map_err(|e| CliError::io(path.as_ref().to_path_buf(), e))
}

const PLOT_TOP: f64 = 20.0;
const PLOT_HEIGHT: f64 = 280.0;
const MARGIN_LEFT: f64 = 70.0;
const GROUP_WIDTH: f64 = 70.0;
const BOX_WIDTH: f64 = 34.0;
const LABEL_SPACE: f64 = 110.0;

/// Renders one box (median, quartiles, 1.5 IQR whiskers, outlier dots) per
/// group. Each group element carries its statistics as `data-` attributes,
/// so the drawing stays machine-checkable against the TSV.
pub fn emit_boxplot_svg(
    table: &ResultsTable,
    metric: MetricKind,
    seed: u64,
    config_hash: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    let groups = metric_groups(table, metric);
    if groups.is_empty() {
        return Err(CliError::Results("no rows to plot".into()));
    }

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for g in &groups {
        for &v in &g.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let y_of = |v: f64| PLOT_TOP + (hi - v) / (hi - lo) * PLOT_HEIGHT;

    let width = MARGIN_LEFT + groups.len() as f64 * GROUP_WIDTH + 20.0;
    let height = PLOT_TOP + PLOT_HEIGHT + LABEL_SPACE;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        "<!-- version = {} | seed = {seed} | config_hash = {config_hash} | metric = {metric} -->",
        env!("CARGO_PKG_VERSION")
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN_LEFT}" y="{PLOT_TOP}" width="{}" height="{PLOT_HEIGHT}" fill="none" stroke="#999"/>"##,
        groups.len() as f64 * GROUP_WIDTH
    );
    for t in 0..=4 {
        let v = lo + (hi - lo) * t as f64 / 4.0;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{y}" x2="{MARGIN_LEFT}" y2="{y}" stroke="#999"/><text x="{}" y="{}" text-anchor="end">{v:.3}</text>"##,
            MARGIN_LEFT - 4.0,
            MARGIN_LEFT - 8.0,
            y + 4.0
        );
    }

    for (i, g) in groups.iter().enumerate() {
        let stats = BoxStats::from_samples(&g.values);
        let cx = MARGIN_LEFT + (i as f64 + 0.5) * GROUP_WIDTH;
        let (x0, x1) = (cx - BOX_WIDTH / 2.0, cx + BOX_WIDTH / 2.0);
        let _ = writeln!(
            svg,
            r#"<g data-label="{}" data-q1="{}" data-median="{}" data-q3="{}" data-whisker-low="{}" data-whisker-high="{}">"#,
            g.label, stats.q1, stats.median, stats.q3, stats.whisker_low, stats.whisker_high
        );
        // Whisker stem and caps.
        let _ = writeln!(
            svg,
            r##"<line x1="{cx}" y1="{}" x2="{cx}" y2="{}" stroke="#333"/>"##,
            y_of(stats.whisker_high),
            y_of(stats.whisker_low)
        );
        for w in [stats.whisker_low, stats.whisker_high] {
            let _ = writeln!(
                svg,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#333"/>"##,
                cx - BOX_WIDTH / 4.0,
                y_of(w),
                cx + BOX_WIDTH / 4.0,
                y_of(w)
            );
        }
        // Box and median.
        let _ = writeln!(
            svg,
            r##"<rect x="{x0}" y="{}" width="{BOX_WIDTH}" height="{}" fill="#9ecae1" stroke="#333"/>"##,
            y_of(stats.q3),
            (y_of(stats.q1) - y_of(stats.q3)).max(0.0)
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{x0}" y1="{}" x2="{x1}" y2="{}" stroke="#333" stroke-width="2"/>"##,
            y_of(stats.median),
            y_of(stats.median)
        );
        for &o in &stats.outliers {
            let _ = writeln!(
                svg,
                r##"<circle cx="{cx}" cy="{}" r="2.5" fill="none" stroke="#d62728"/>"##,
                y_of(o)
            );
        }
        let label_y = PLOT_TOP + PLOT_HEIGHT + 14.0;
        let _ = writeln!(
            svg,
            r#"<text x="{cx}" y="{label_y}" text-anchor="end" transform="rotate(-45 {cx} {label_y})">{}</text>"#,
            g.label
        );
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    std::fs::write(path.as_ref(), svg).map_err(|e| CliError::io(path.as_ref().to_path_buf(), e))
}
