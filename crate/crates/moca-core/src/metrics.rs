//! External clustering validity indices computed against ground-truth
//! labels: purity, Rand index, adjusted Rand index, pairwise
//! precision/recall/F, and entropy.
//!
//! The Rand index route goes through exhaustive pair counting while the
//! adjusted Rand index goes through the contingency table, so the two
//! formulations can cross-check each other in tests.

use crate::error::{MocaError, Result};

/// Cluster-by-class contingency counts.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<usize>>,
    pub cluster_sizes: Vec<usize>,
    pub class_sizes: Vec<usize>,
    pub total: usize,
}

impl ContingencyTable {
    pub fn build(predicted: &[usize], truth: &[usize]) -> Result<ContingencyTable> {
        if predicted.len() != truth.len() {
            return Err(MocaError::InvalidParameter {
                name: "labels",
                reason: format!(
                    "predicted covers {} objects, truth covers {}",
                    predicted.len(),
                    truth.len()
                ),
            });
        }
        let n_clusters = predicted.iter().max().map_or(0, |&v| v + 1);
        let n_classes = truth.iter().max().map_or(0, |&v| v + 1);
        let mut counts = vec![vec![0usize; n_classes]; n_clusters];
        for (&p, &t) in predicted.iter().zip(truth) {
            counts[p][t] += 1;
        }
        let cluster_sizes = counts.iter().map(|row| row.iter().sum()).collect();
        let class_sizes = (0..n_classes)
            .map(|k| counts.iter().map(|row| row[k]).sum())
            .collect();
        Ok(ContingencyTable {
            counts,
            cluster_sizes,
            class_sizes,
            total: predicted.len(),
        })
    }
}

/// Agreement counts over all unordered object pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Counts tp/fp/fn/tn by enumerating every unordered pair.
pub fn pair_counts(predicted: &[usize], truth: &[usize]) -> Result<PairCounts> {
    if predicted.len() != truth.len() {
        return Err(MocaError::InvalidParameter {
            name: "labels",
            reason: format!(
                "predicted covers {} objects, truth covers {}",
                predicted.len(),
                truth.len()
            ),
        });
    }
    let n = predicted.len();
    let mut pc = PairCounts { tp: 0, tn: 0, fp: 0, fn_: 0 };
    for i in 0..n {
        for j in i + 1..n {
            let same_cluster = predicted[i] == predicted[j];
            let same_class = truth[i] == truth[j];
            match (same_cluster, same_class) {
                (true, true) => pc.tp += 1,
                (true, false) => pc.fp += 1,
                (false, true) => pc.fn_ += 1,
                (false, false) => pc.tn += 1,
            }
        }
    }
    Ok(pc)
}

/// Fraction of objects in their cluster's majority class.
pub fn purity(ct: &ContingencyTable) -> f64 {
    if ct.total == 0 {
        return 0.0;
    }
    let correct: usize = ct
        .counts
        .iter()
        .map(|row| row.iter().copied().max().unwrap_or(0))
        .sum();
    correct as f64 / ct.total as f64
}

/// Fraction of pair decisions that agree with the ground truth.
pub fn rand_index(pc: &PairCounts) -> f64 {
    let total = pc.total();
    if total == 0 {
        return 0.0;
    }
    (pc.tp + pc.tn) as f64 / total as f64
}

fn choose2(n: usize) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

/// Hubert-Arabie adjusted Rand index from the contingency table.
pub fn adjusted_rand_index(ct: &ContingencyTable) -> f64 {
    let index: f64 = ct
        .counts
        .iter()
        .flat_map(|row| row.iter())
        .map(|&c| choose2(c))
        .sum();
    let row_sum: f64 = ct.cluster_sizes.iter().map(|&s| choose2(s)).sum();
    let col_sum: f64 = ct.class_sizes.iter().map(|&s| choose2(s)).sum();
    let pairs = choose2(ct.total);
    if pairs == 0.0 {
        return 0.0;
    }
    let expected = row_sum * col_sum / pairs;
    let max = 0.5 * (row_sum + col_sum);
    if (max - expected).abs() < f64::EPSILON {
        // both partitions trivial: identical ones score 1, anything else 0
        return if (index - expected).abs() < f64::EPSILON { 1.0 } else { 0.0 };
    }
    (index - expected) / (max - expected)
}

/// Pairwise precision tp/(tp+fp); 0 when no pair shares a cluster.
pub fn precision(pc: &PairCounts) -> f64 {
    let denom = pc.tp + pc.fp;
    if denom == 0 {
        0.0
    } else {
        pc.tp as f64 / denom as f64
    }
}

/// Pairwise recall tp/(tp+fn); 0 when no pair shares a class.
pub fn recall(pc: &PairCounts) -> f64 {
    let denom = pc.tp + pc.fn_;
    if denom == 0 {
        0.0
    } else {
        pc.tp as f64 / denom as f64
    }
}

/// Weighted F-measure (w²+1)PR / (w²P + R); 0 on a zero denominator.
pub fn f_measure(pc: &PairCounts, w: f64) -> f64 {
    let p = precision(pc);
    let r = recall(pc);
    let denom = w * w * p + r;
    if denom == 0.0 {
        0.0
    } else {
        (w * w + 1.0) * p * r / denom
    }
}

/// Size-weighted cluster entropy normalized by log of the class count.
/// A single true class yields 0 by convention.
pub fn entropy(ct: &ContingencyTable) -> f64 {
    let k = ct.class_sizes.iter().filter(|&&s| s > 0).count();
    if k <= 1 || ct.total == 0 {
        return 0.0;
    }
    let log_k = (k as f64).ln();
    ct.counts
        .iter()
        .zip(&ct.cluster_sizes)
        .filter(|(_, &nj)| nj > 0)
        .map(|(row, &nj)| {
            let ej: f64 = row
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| {
                    let p = c as f64 / nj as f64;
                    -p * p.ln()
                })
                .sum::<f64>()
                / log_k;
            nj as f64 / ct.total as f64 * ej
        })
        .sum()
}

/// All six validity indices for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub purity: f64,
    pub rand_index: f64,
    pub adjusted_rand_index: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub entropy: f64,
}

pub fn score(predicted: &[usize], truth: &[usize]) -> Result<MetricsReport> {
    let ct = ContingencyTable::build(predicted, truth)?;
    let pc = pair_counts(predicted, truth)?;
    Ok(MetricsReport {
        purity: purity(&ct),
        rand_index: rand_index(&pc),
        adjusted_rand_index: adjusted_rand_index(&ct),
        precision: precision(&pc),
        recall: recall(&pc),
        f_measure: f_measure(&pc, 1.0),
        entropy: entropy(&ct),
    })
}
