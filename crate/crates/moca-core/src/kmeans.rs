//! Minimal seeded k-means baseline (Lloyd's algorithm) used by the
//! benchmark harness for comparison runs.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data_model::Dataset;
use crate::error::{MocaError, Result};

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's iteration from seeded random distinct initial centers. Empty
/// clusters are reseeded from the point farthest from its center.
/// Deterministic for a fixed seed.
pub fn kmeans_baseline(data: &Dataset, k: usize, seed: u64, max_iters: usize) -> Result<Vec<usize>> {
    let m = data.len();
    let d = data.dim();
    if k < 1 || k > m {
        return Err(MocaError::InvalidParameter {
            name: "k",
            reason: format!("{k} outside valid interval [1, {m}]"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<Vec<f64>> = sample(&mut rng, m, k)
        .into_iter()
        .map(|i| data.row(i).to_vec())
        .collect();
    let mut assignment = vec![0usize; m];

    for _ in 0..max_iters {
        let mut changed = false;
        for (i, slot) in assignment.iter_mut().enumerate() {
            let best = (0..k)
                .min_by(|&a, &b| {
                    sq_dist(data.row(i), &centers[a])
                        .partial_cmp(&sq_dist(data.row(i), &centers[b]))
                        .unwrap()
                        .then(a.cmp(&b))
                })
                .unwrap();
            if *slot != best {
                *slot = best;
                changed = true;
            }
        }

        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for i in 0..m {
            counts[assignment[i]] += 1;
            for (j, &v) in data.row(i).iter().enumerate() {
                sums[assignment[i]][j] += v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // reseed from the point farthest from its current center
                let far = (0..m)
                    .max_by(|&a, &b| {
                        sq_dist(data.row(a), &centers[assignment[a]])
                            .partial_cmp(&sq_dist(data.row(b), &centers[assignment[b]]))
                            .unwrap()
                            .then(b.cmp(&a))
                    })
                    .unwrap();
                centers[c] = data.row(far).to_vec();
                changed = true;
            } else {
                for j in 0..d {
                    centers[c][j] = sums[c][j] / counts[c] as f64;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(assignment)
}
