//! Built-in synthetic scenarios: two Gaussian classes in five dimensions.

use std::fmt;
use std::str::FromStr;

use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Identifier of one of the six built-in scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] = [
        ScenarioId::S1,
        ScenarioId::S2,
        ScenarioId::S3,
        ScenarioId::S4,
        ScenarioId::S5,
        ScenarioId::S6,
    ];
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioId::S1 => "S1",
            ScenarioId::S2 => "S2",
            ScenarioId::S3 => "S3",
            ScenarioId::S4 => "S4",
            ScenarioId::S5 => "S5",
            ScenarioId::S6 => "S6",
        })
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(ScenarioId::S1),
            "S2" => Ok(ScenarioId::S2),
            "S3" => Ok(ScenarioId::S3),
            "S4" => Ok(ScenarioId::S4),
            "S5" => Ok(ScenarioId::S5),
            "S6" => Ok(ScenarioId::S6),
            other => Err(Error::UnknownScenario(other.into())),
        }
    }
}

/// Normal parameters per class for one scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub id: ScenarioId,
    pub class0_mean: f64,
    pub class0_sd: f64,
    pub class1_mean: f64,
    pub class1_sd: f64,
    pub n_per_class: usize,
    pub p: usize,
}

/// The six built-in scenarios: 50 + 50 rows, 5 i.i.d. normal features per
/// class, separated by mean, spread, or both.
pub fn builtin_specs() -> Vec<ScenarioSpec> {
    let make = |id, m0, s0, m1, s1| ScenarioSpec {
        id,
        class0_mean: m0,
        class0_sd: s0,
        class1_mean: m1,
        class1_sd: s1,
        n_per_class: 50,
        p: 5,
    };
    vec![
        make(ScenarioId::S1, 5.0, 5.0, 10.0, 10.0),
        make(ScenarioId::S2, 5.0, 5.0, 10.0, 5.0),
        make(ScenarioId::S3, 5.0, 5.0, 10.0, 4.0),
        make(ScenarioId::S4, 5.0, 4.0, 10.0, 4.0),
        make(ScenarioId::S5, 5.0, 5.0, 5.0, 10.0),
        make(ScenarioId::S6, 3.0, 3.0, 1.0, 3.0),
    ]
}

/// Looks up the built-in spec for an id.
pub fn spec_for(id: ScenarioId) -> ScenarioSpec {
    builtin_specs()
        .into_iter()
        .find(|s| s.id == id)
        .expect("all ids have built-in specs")
}

/// Draws one dataset: the class-0 block first, then the class-1 block, each
/// filled row by row, feature by feature, from the given stream.
pub fn generate(spec: &ScenarioSpec, rng: &mut RngStream) -> Result<Dataset> {
    if spec.class0_sd <= 0.0 || spec.class1_sd <= 0.0 {
        return Err(Error::ConfigInvalid(
            "scenario standard deviations must be positive".into(),
        ));
    }
    if spec.n_per_class == 0 || spec.p == 0 {
        return Err(Error::ConfigInvalid("empty scenario".into()));
    }
    let n = 2 * spec.n_per_class;
    let mut data = Vec::with_capacity(n * spec.p);
    let mut labels = Vec::with_capacity(n);
    for &(mean, sd, label) in &[
        (spec.class0_mean, spec.class0_sd, 0u8),
        (spec.class1_mean, spec.class1_sd, 1u8),
    ] {
        for _ in 0..spec.n_per_class {
            for _ in 0..spec.p {
                data.push(rng.normal(mean, sd));
            }
            labels.push(label);
        }
    }
    let names = (1..=spec.p).map(|j| format!("f{j}")).collect();
    Dataset::new(Matrix::new(n, spec.p, data)?, labels, names)
}
