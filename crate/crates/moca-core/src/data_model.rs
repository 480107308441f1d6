//! Dataset storage, pairwise Euclidean distances, and ranked neighbor tables.
//!
//! Everything here is immutable after construction and shared read-only by
//! the objective functions, the game construction, and the pipeline.

use rayon::prelude::*;

use crate::error::{MocaError, Result};

/// A dense real-valued dataset: `m` objects with `d` attributes each,
/// plus optional ground-truth class labels used only for evaluation.
#[derive(Debug, Clone)]
pub struct Dataset {
    objects: Vec<f64>,
    labels: Option<Vec<String>>,
    m: usize,
    d: usize,
}

impl Dataset {
    /// Builds a dataset from row-major coordinates. Rejects non-finite
    /// coordinates, fewer than two objects, and label-length mismatches.
    pub fn new(objects: Vec<f64>, m: usize, d: usize, labels: Option<Vec<String>>) -> Result<Self> {
        if m < 2 {
            return Err(MocaError::InvalidDataset(format!(
                "need at least 2 objects, got {m}"
            )));
        }
        if d < 1 {
            return Err(MocaError::InvalidDataset("need at least 1 attribute".into()));
        }
        if objects.len() != m * d {
            return Err(MocaError::InvalidDataset(format!(
                "coordinate buffer has {} entries, expected {}x{}",
                objects.len(),
                m,
                d
            )));
        }
        if let Some(bad) = objects.iter().position(|v| !v.is_finite()) {
            return Err(MocaError::InvalidDataset(format!(
                "non-finite coordinate at object {}, attribute {}",
                bad / d,
                bad % d
            )));
        }
        if let Some(ref l) = labels {
            if l.len() != m {
                return Err(MocaError::InvalidDataset(format!(
                    "{} labels for {} objects",
                    l.len(),
                    m
                )));
            }
        }
        Ok(Dataset { objects, labels, m, d })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        let m = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(MocaError::InvalidDataset("ragged rows".into()));
        }
        Self::new(rows.into_iter().flatten().collect(), m, d, labels)
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false // m >= 2 by construction
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.objects[i * self.d..(i + 1) * self.d]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Dense class ids in order of first appearance, for metric computation.
    pub fn label_ids(&self) -> Option<Vec<usize>> {
        let labels = self.labels.as_ref()?;
        let mut seen: Vec<&str> = Vec::new();
        let ids = labels
            .iter()
            .map(|l| match seen.iter().position(|s| *s == l.as_str()) {
                Some(i) => i,
                None => {
                    seen.push(l);
                    seen.len() - 1
                }
            })
            .collect();
        Some(ids)
    }

    /// Maps every attribute affinely onto [0, 1]; a constant attribute maps to 0.
    pub fn min_max_normalize(&self) -> Dataset {
        let mut lo = vec![f64::INFINITY; self.d];
        let mut hi = vec![f64::NEG_INFINITY; self.d];
        for i in 0..self.m {
            for (j, &v) in self.row(i).iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        let mut objects = Vec::with_capacity(self.m * self.d);
        for i in 0..self.m {
            for (j, &v) in self.row(i).iter().enumerate() {
                let range = hi[j] - lo[j];
                objects.push(if range > 0.0 { (v - lo[j]) / range } else { 0.0 });
            }
        }
        Dataset {
            objects,
            labels: self.labels.clone(),
            m: self.m,
            d: self.d,
        }
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Dense symmetric matrix of pairwise Euclidean distances.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    dis: Vec<f64>,
    m: usize,
    dmax: f64,
}

impl DistanceMatrix {
    /// Computes all pairwise distances. Rows are filled in parallel but the
    /// result is identical to the sequential computation.
    pub fn build(data: &Dataset) -> DistanceMatrix {
        let m = data.len();
        let dis: Vec<f64> = (0..m)
            .into_par_iter()
            .flat_map_iter(|i| {
                let ri = data.row(i);
                (0..m).map(move |j| if i == j { 0.0 } else { euclidean(ri, data.row(j)) })
            })
            .collect();
        let dmax = dis.iter().cloned().fold(0.0, f64::max);
        DistanceMatrix { dis, m, dmax }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dis[i * self.m + j]
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn dmax(&self) -> f64 {
        self.dmax
    }
}

/// Per-object neighbor lists: for each object, all other objects sorted by
/// ascending distance, ties broken by ascending object index.
#[derive(Debug, Clone)]
pub struct KnnTable {
    neighbors: Vec<Vec<usize>>,
    l: usize,
}

impl KnnTable {
    pub fn build(dm: &DistanceMatrix, l: usize) -> Result<KnnTable> {
        let m = dm.len();
        if l < 1 || l > m - 1 {
            return Err(MocaError::InvalidParameter {
                name: "L",
                reason: format!("{l} outside valid interval [1, {}]", m - 1),
            });
        }
        let neighbors = (0..m)
            .map(|h| {
                let mut order: Vec<usize> = (0..m).filter(|&j| j != h).collect();
                order.sort_by(|&a, &b| {
                    dm.get(h, a)
                        .partial_cmp(&dm.get(h, b))
                        .unwrap()
                        .then(a.cmp(&b))
                });
                order
            })
            .collect();
        Ok(KnnTable { neighbors, l })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// The `L` nearest neighbors of object `h`, nearest first.
    pub fn nearest(&self, h: usize) -> &[usize] {
        &self.neighbors[h][..self.l]
    }

    pub fn full_ranking(&self, h: usize) -> &[usize] {
        &self.neighbors[h]
    }
}
