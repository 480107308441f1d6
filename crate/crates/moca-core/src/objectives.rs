//! The two clustering objectives (R-square and connectivity), their product,
//! and the dissimilarity values used to pick cluster heads.
//!
//! All weights use the full dataset size `m`, even while some objects are
//! still unassigned, so the product stays comparable across rounds.

use std::collections::BTreeSet;

use crate::data_model::{Dataset, DistanceMatrix, KnnTable};

/// A cluster with a fixed representative object (head).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub head: usize,
    pub members: BTreeSet<usize>,
}

impl Cluster {
    pub fn singleton(head: usize) -> Cluster {
        Cluster {
            head,
            members: BTreeSet::from([head]),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A partition in progress: clusters plus the pool of unassigned objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub clusters: Vec<Cluster>,
    pub unassigned: BTreeSet<usize>,
}

impl Clustering {
    /// Starts from singleton clusters around the given heads; everything
    /// else is unassigned.
    pub fn from_heads(heads: &[usize], m: usize) -> Clustering {
        let head_set: BTreeSet<usize> = heads.iter().copied().collect();
        Clustering {
            clusters: heads.iter().map(|&h| Cluster::singleton(h)).collect(),
            unassigned: (0..m).filter(|i| !head_set.contains(i)).collect(),
        }
    }

    pub fn assigned_count(&self) -> usize {
        self.clusters.iter().map(Cluster::len).sum()
    }

    /// Per-object cluster index; panics if any object is unassigned.
    pub fn assignment(&self, m: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; m];
        for (ci, c) in self.clusters.iter().enumerate() {
            for &o in &c.members {
                out[o] = ci;
            }
        }
        assert!(out.iter().all(|&v| v != usize::MAX), "partition incomplete");
        out
    }

    /// Checks disjointness, coverage, head membership, and non-emptiness.
    pub fn is_valid(&self, m: usize) -> bool {
        let mut seen = vec![false; m];
        for c in &self.clusters {
            if c.members.is_empty() || !c.members.contains(&c.head) {
                return false;
            }
            for &o in &c.members {
                if o >= m || seen[o] {
                    return false;
                }
                seen[o] = true;
            }
        }
        for &o in &self.unassigned {
            if o >= m || seen[o] {
                return false;
            }
            seen[o] = true;
        }
        seen.iter().all(|&s| s)
    }
}

/// All objective values for one clustering, in one place.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveReport {
    pub inter_inertia: f64,
    pub intra_inertia: f64,
    pub r_square: f64,
    pub connectivity: f64,
    pub phi: f64,
}

/// Per-attribute arithmetic mean over all objects.
pub fn gravity_center(data: &Dataset) -> Vec<f64> {
    let (m, d) = (data.len(), data.dim());
    let mut g = vec![0.0; d];
    for i in 0..m {
        for (j, &v) in data.row(i).iter().enumerate() {
            g[j] += v;
        }
    }
    for v in &mut g {
        *v /= m as f64;
    }
    g
}

fn dist_to_center(data: &Dataset, i: usize, g: &[f64]) -> f64 {
    data.row(i)
        .iter()
        .zip(g)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Inter-cluster inertia: (1/m) Σ |C_i| d²(ch_i, g).
pub fn inter_inertia(clustering: &Clustering, data: &Dataset, g: &[f64]) -> f64 {
    let m = data.len() as f64;
    clustering
        .clusters
        .iter()
        .map(|c| {
            let d = dist_to_center(data, c.head, g);
            c.len() as f64 * d * d
        })
        .sum::<f64>()
        / m
}

/// Intra-cluster inertia: (1/m) Σ_C Σ_{ω∈C} d²(ω, ch).
pub fn intra_inertia(clustering: &Clustering, dm: &DistanceMatrix) -> f64 {
    let m = dm.len() as f64;
    clustering
        .clusters
        .iter()
        .map(|c| {
            c.members
                .iter()
                .map(|&o| {
                    let d = dm.get(o, c.head);
                    d * d
                })
                .sum::<f64>()
        })
        .sum::<f64>()
        / m
}

fn r_square_from(inter: f64, intra: f64) -> f64 {
    let total = inter + intra;
    if total > 0.0 {
        inter / total
    } else {
        0.0
    }
}

/// Separation ratio I_R / (I_A + I_R); 0 when both inertias vanish.
pub fn r_square(clustering: &Clustering, data: &Dataset, dm: &DistanceMatrix) -> f64 {
    let g = gravity_center(data);
    r_square_from(inter_inertia(clustering, data, &g), intra_inertia(clustering, dm))
}

/// Mean fraction of each member's L nearest dataset-wide neighbors that lie
/// in the same cluster.
pub fn cluster_connectivity(cluster: &Cluster, knn: &KnnTable) -> f64 {
    let l = knn.l() as f64;
    let sum: f64 = cluster
        .members
        .iter()
        .map(|&h| {
            knn.nearest(h)
                .iter()
                .filter(|n| cluster.members.contains(n))
                .count() as f64
                / l
        })
        .sum();
    sum / cluster.len() as f64
}

/// Size-weighted connectivity over all clusters; unassigned objects
/// contribute nothing and the weights still divide by the full size m.
pub fn total_connectivity(clustering: &Clustering, knn: &KnnTable, m: usize) -> f64 {
    clustering
        .clusters
        .iter()
        .map(|c| c.len() as f64 / m as f64 * cluster_connectivity(c, knn))
        .sum()
}

/// The maximized product R² × connectivity.
pub fn phi(clustering: &Clustering, data: &Dataset, dm: &DistanceMatrix, knn: &KnnTable) -> f64 {
    r_square(clustering, data, dm) * total_connectivity(clustering, knn, data.len())
}

pub fn objective_report(
    clustering: &Clustering,
    data: &Dataset,
    dm: &DistanceMatrix,
    knn: &KnnTable,
) -> ObjectiveReport {
    let g = gravity_center(data);
    let inter = inter_inertia(clustering, data, &g);
    let intra = intra_inertia(clustering, dm);
    let r2 = r_square_from(inter, intra);
    let connec = total_connectivity(clustering, knn, data.len());
    ObjectiveReport {
        inter_inertia: inter,
        intra_inertia: intra,
        r_square: r2,
        connectivity: connec,
        phi: r2 * connec,
    }
}

/// Mean distance from each object to all others; small value means high
/// density around the object.
pub fn dissimilarity_vector(dm: &DistanceMatrix) -> Vec<f64> {
    let m = dm.len();
    (0..m)
        .map(|o| (0..m).filter(|&j| j != o).map(|j| dm.get(o, j)).sum::<f64>() / (m - 1) as f64)
        .collect()
}
