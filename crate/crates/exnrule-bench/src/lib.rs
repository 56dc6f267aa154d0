//! Shared fixtures for the criterion benchmarks.

use exnrule::synthgen::{generate, spec_for};
use exnrule::{Dataset, RngStream, ScenarioId};

/// One fixed draw of a built-in scenario.
pub fn scenario_data(id: ScenarioId, seed: u64) -> Dataset {
    generate(&spec_for(id), &mut RngStream::new(seed, 0)).expect("built-in specs generate")
}

/// A larger synthetic table for scan-heavy benchmarks.
pub fn wide_data(n: usize, p: usize, seed: u64) -> Dataset {
    use exnrule::Matrix;

    let mut rng = RngStream::new(seed, 1);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.normal(0.0, 1.0)).collect())
        .collect();
    let mut labels: Vec<u8> = (0..n).map(|_| (rng.next_u64() & 1) as u8).collect();
    labels[0] = 0;
    labels[1] = 1;
    Dataset::new(
        Matrix::from_rows(rows).expect("rectangular"),
        labels,
        (0..p).map(|j| format!("f{j}")).collect(),
    )
    .expect("valid dataset")
}
