//! Experiment configuration: a flat key-value file plus CLI overrides,
//! with the override always winning.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use exnrule::ScenarioId;

use crate::error::{CliError, Result};
use crate::results::fnv1a64;

/// Classifiers the driver can dispatch to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    ExNRule,
    Knn,
    Wknn,
    Rknn,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::ExNRule, Method::Knn, Method::Wknn, Method::Rknn];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ExNRule => "exnrule",
            Method::Knn => "knn",
            Method::Wknn => "wknn",
            Method::Rknn => "rknn",
        })
    }
}

impl FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exnrule" => Ok(Method::ExNRule),
            "knn" => Ok(Method::Knn),
            "wknn" => Ok(Method::Wknn),
            "rknn" => Ok(Method::Rknn),
            other => Err(CliError::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// A dataset reference: a built-in scenario id or a named CSV file.
#[derive(Clone, Debug, PartialEq)]
pub enum DatasetSource {
    Scenario(ScenarioId),
    Csv { name: String, path: PathBuf },
}

impl DatasetSource {
    pub fn name(&self) -> String {
        match self {
            DatasetSource::Scenario(id) => id.to_string(),
            DatasetSource::Csv { name, .. } => name.clone(),
        }
    }

    /// `S3` selects a scenario; `name=path.csv` or a bare path selects a
    /// CSV (the bare path's file stem becomes the dataset name).
    pub fn parse(token: &str) -> Result<Self> {
        if let Ok(id) = token.parse::<ScenarioId>() {
            return Ok(DatasetSource::Scenario(id));
        }
        if let Some((name, path)) = token.split_once('=') {
            if name.is_empty() || path.is_empty() {
                return Err(CliError::Config(format!("bad dataset token '{token}'")));
            }
            return Ok(DatasetSource::Csv {
                name: name.to_string(),
                path: PathBuf::from(path),
            });
        }
        if token.ends_with(".csv") {
            let path = PathBuf::from(token);
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .filter(|s| !s.is_empty())
                .ok_or_else(|| CliError::Config(format!("bad dataset token '{token}'")))?;
            return Ok(DatasetSource::Csv { name, path });
        }
        Err(CliError::Config(format!(
            "dataset '{token}' is neither a scenario id (S1..S6) nor a CSV reference"
        )))
    }
}

/// Everything one experiment run depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSource>,
    pub methods: Vec<Method>,
    pub repetitions: usize,
    pub train_fraction: f64,
    pub ensemble_size: usize,
    pub k_values: Vec<usize>,
    pub tune: bool,
    pub master_seed: u64,
    pub scale: bool,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            datasets: ScenarioId::ALL
                .iter()
                .map(|&id| DatasetSource::Scenario(id))
                .collect(),
            methods: Method::ALL.to_vec(),
            repetitions: 50,
            train_fraction: 0.7,
            ensemble_size: 500,
            k_values: vec![3],
            tune: false,
            master_seed: 42,
            scale: false,
            output_dir: PathBuf::from("bench-out"),
        }
    }
}

fn parse_list<T, E: fmt::Display>(
    value: &str,
    what: &str,
    parse: impl Fn(&str) -> std::result::Result<T, E>,
) -> Result<Vec<T>> {
    let items: Vec<&str> = value
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    if items.is_empty() {
        return Err(CliError::Config(format!("empty {what} list")));
    }
    items
        .into_iter()
        .map(|t| parse(t).map_err(|e| CliError::Config(format!("{what} '{t}': {e}"))))
        .collect()
}

impl ExperimentConfig {
    /// Applies one `key = value` assignment, as found in a config file or
    /// implied by a CLI flag.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "datasets" => {
                self.datasets = parse_list(value, "dataset", DatasetSource::parse)?;
            }
            "methods" => {
                self.methods = parse_list(value, "method", Method::from_str)?;
            }
            "reps" | "repetitions" => {
                self.repetitions = value
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad repetitions '{value}'")))?;
            }
            "train_fraction" => {
                self.train_fraction = value
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad train_fraction '{value}'")))?;
            }
            "B" | "ensemble_size" => {
                self.ensemble_size = value
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad ensemble size '{value}'")))?;
            }
            "k" | "k_values" => {
                self.k_values = parse_list(value, "k", usize::from_str)?;
            }
            "tune" => {
                self.tune = parse_bool(value)?;
            }
            "scale" => {
                self.scale = parse_bool(value)?;
            }
            "seed" | "master_seed" => {
                self.master_seed = value
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad seed '{value}'")))?;
            }
            "out" | "output_dir" => {
                self.output_dir = PathBuf::from(value);
            }
            other => {
                return Err(CliError::Config(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    /// Reads a flat key-value file ('#' starts a comment) over the
    /// defaults.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::io(path.to_path_buf(), e))?;
        let mut config = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected 'key = value', got '{raw}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Sanity-checks the assembled configuration.
    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(CliError::Config("no datasets selected".into()));
        }
        if self.methods.is_empty() {
            return Err(CliError::Config("no methods selected".into()));
        }
        if self.repetitions == 0 {
            return Err(CliError::Config("repetitions must be >= 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(CliError::Config(format!(
                "train fraction {} outside (0, 1)",
                self.train_fraction
            )));
        }
        if self.ensemble_size == 0 {
            return Err(CliError::Config("ensemble size must be >= 1".into()));
        }
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return Err(CliError::Config("k values must be >= 1".into()));
        }
        if self.k_values.len() > 64 {
            return Err(CliError::Config("at most 64 k values per run".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for d in &self.datasets {
            if !seen.insert(d.name()) {
                return Err(CliError::Config(format!(
                    "duplicate dataset name '{}'",
                    d.name()
                )));
            }
        }
        Ok(())
    }

    /// Canonical semantic description: everything that influences emitted
    /// numbers, and nothing that does not (output paths, worker counts).
    pub fn canonical_string(&self) -> String {
        let datasets: Vec<String> = self
            .datasets
            .iter()
            .map(|d| match d {
                DatasetSource::Scenario(id) => id.to_string(),
                DatasetSource::Csv { name, path } => format!("{name}={}", path.display()),
            })
            .collect();
        let methods: Vec<String> = self.methods.iter().map(Method::to_string).collect();
        let ks: Vec<String> = self.k_values.iter().map(usize::to_string).collect();
        format!(
            "datasets={};methods={};reps={};train_fraction={};B={};k={};tune={};scale={};seed={}",
            datasets.join(","),
            methods.join(","),
            self.repetitions,
            self.train_fraction,
            self.ensemble_size,
            ks.join(","),
            self.tune,
            self.scale,
            self.master_seed
        )
    }

    /// Hash of the canonical description, stamped into output headers.
    pub fn config_hash(&self) -> String {
        format!("{:016x}", fnv1a64(self.canonical_string().as_bytes()))
    }
}

fn parse_bool(value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(CliError::Config(format!("bad boolean '{other}'"))),
    }
}
