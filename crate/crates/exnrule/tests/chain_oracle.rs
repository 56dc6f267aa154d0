//! Greedy-chain equivalence against an independent brute-force oracle.

use exnrule::dataset::{BaseLearnerSample, Dataset, Matrix};
use exnrule::distance::DistanceMetric;
use exnrule::exnrule::extended_chain;
use exnrule::rng::RngStream;

/// Brute-force greedy walk: recompute every pairwise distance with its own
/// arithmetic, take the argmin over remaining entries in original pool
/// order (first wins on ties), remove that occurrence, repeat.
fn oracle_chain(
    pool_rows: &[usize],
    feature_indices: &[usize],
    data: &Dataset,
    query: &[f64],
    k: usize,
) -> (Vec<usize>, Vec<usize>, Vec<u8>, Vec<f64>) {
    let mut remaining: Vec<(usize, usize)> = pool_rows.iter().copied().enumerate().collect();
    let mut current: Vec<f64> = query.to_vec();
    let mut positions = Vec::new();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut hops = Vec::new();
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for (slot, &(_, row)) in remaining.iter().enumerate() {
            let mut sum = 0.0;
            for (c, &j) in feature_indices.iter().enumerate() {
                let d = data.row(row)[j] - current[c];
                sum += d * d;
            }
            let dist = sum.sqrt();
            if best.is_none_or(|(_, bd)| dist < bd) {
                best = Some((slot, dist));
            }
        }
        let (slot, dist) = best.unwrap();
        let (orig, row) = remaining.remove(slot);
        positions.push(orig);
        rows.push(row);
        labels.push(data.label(row));
        hops.push(dist);
        current = feature_indices.iter().map(|&j| data.row(row)[j]).collect();
    }
    (positions, rows, labels, hops)
}

#[test]
fn chain_matches_brute_force_greedy_oracle() {
    let mut rng = RngStream::new(0x5eed, 0);
    for trial in 0..500u32 {
        let n = 1 + rng.index(20);
        let p = 1 + rng.index(5);
        let p_prime = 1 + rng.index(p);
        // Coordinates on a small integer grid make exact ties common, so
        // the first-position tie rule is genuinely exercised.
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.index(6) as f64).collect())
            .collect();
        let labels: Vec<u8> = (0..n).map(|_| (rng.next_u64() & 1) as u8).collect();
        let data = Dataset::new(
            Matrix::from_rows(rows).unwrap(),
            labels,
            (0..p).map(|j| format!("f{j}")).collect(),
        )
        .unwrap();

        // A bootstrap-style pool with duplicates.
        let pool_rows: Vec<usize> = (0..n).map(|_| rng.index(n)).collect();
        let feature_indices = rng.sample_without_replacement(p, p_prime);
        let k = 1 + rng.index(pool_rows.len());
        let query: Vec<f64> = (0..p_prime).map(|_| rng.index(6) as f64).collect();

        let sample = BaseLearnerSample {
            row_indices: pool_rows.clone(),
            feature_indices: feature_indices.clone(),
        };
        let chain =
            extended_chain(&sample, &data, &query, k, DistanceMetric::euclidean()).unwrap();
        let (positions, rows, labels, hops) =
            oracle_chain(&pool_rows, &feature_indices, &data, &query, k);

        assert_eq!(chain.pool_positions, positions, "trial {trial}");
        assert_eq!(chain.row_indices, rows, "trial {trial}");
        assert_eq!(chain.labels, labels, "trial {trial}");
        assert_eq!(chain.hop_distances, hops, "trial {trial}");
    }
}
