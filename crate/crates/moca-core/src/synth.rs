//! Seeded synthetic dataset generation: isotropic Gaussian blobs with
//! blob ids as ground-truth labels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data_model::Dataset;
use crate::error::{MocaError, Result};

/// One Gaussian blob: how many points, where, and how spread out.
#[derive(Debug, Clone)]
pub struct BlobSpec {
    pub count: usize,
    pub center: Vec<f64>,
    pub spread: f64,
}

/// Samples every blob with a ChaCha stream seeded once, so a fixed seed
/// always yields the identical dataset.
pub fn generate_gaussian_blobs(blobs: &[BlobSpec], seed: u64) -> Result<Dataset> {
    if blobs.is_empty() {
        return Err(MocaError::InvalidParameter {
            name: "blobs",
            reason: "need at least one blob".into(),
        });
    }
    let d = blobs[0].center.len();
    if d == 0 {
        return Err(MocaError::InvalidParameter {
            name: "blobs",
            reason: "blob centers need at least one dimension".into(),
        });
    }
    for (i, b) in blobs.iter().enumerate() {
        if b.center.len() != d {
            return Err(MocaError::InvalidParameter {
                name: "blobs",
                reason: format!("blob {i} has dimension {}, expected {d}", b.center.len()),
            });
        }
        if b.spread <= 0.0 || !b.spread.is_finite() || b.count == 0 {
            return Err(MocaError::InvalidParameter {
                name: "blobs",
                reason: format!("blob {i} needs count >= 1 and spread > 0"),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (id, b) in blobs.iter().enumerate() {
        for _ in 0..b.count {
            let row: Vec<f64> = b
                .center
                .iter()
                .map(|&c| c + b.spread * normal.sample(&mut rng))
                .collect();
            rows.push(row);
            labels.push(format!("blob{id}"));
        }
    }
    Dataset::from_rows(rows, Some(labels))
}

/// Parses a blob list of the form `count@c1:c2:...:cd` (one element per
/// blob), all blobs sharing one spread. Used by the CLI's `gen` command.
pub fn parse_blob_list(spec: &str, spread: f64) -> Result<Vec<BlobSpec>> {
    spec.split(',')
        .map(|part| {
            let (count, center) = part.split_once('@').ok_or_else(|| MocaError::InvalidParameter {
                name: "blobs",
                reason: format!("expected count@c1:c2:..., got {part:?}"),
            })?;
            let count = count.trim().parse::<usize>().map_err(|e| MocaError::InvalidParameter {
                name: "blobs",
                reason: format!("bad count in {part:?}: {e}"),
            })?;
            let center = center
                .split(':')
                .map(|c| {
                    c.trim().parse::<f64>().map_err(|e| MocaError::InvalidParameter {
                        name: "blobs",
                        reason: format!("bad coordinate in {part:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(BlobSpec { count, center, spread })
        })
        .collect()
}
