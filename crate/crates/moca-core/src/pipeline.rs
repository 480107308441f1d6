//! The full clustering pipeline: head identification, repeated congestion
//! games, acceptance of equilibrium allocations, single-linkage merging,
//! and leftover assignment.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::congestion_game::{solve_equilibrium, verify_equilibrium, GameSpec};
use crate::data_model::{Dataset, DistanceMatrix, KnnTable};
use crate::error::{MocaError, Result};
use crate::objectives::{
    cluster_connectivity, gravity_center, inter_inertia, intra_inertia, phi, Clustering,
};

/// Neighbor-count parameter: fixed or derived from the dataset size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborCount {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub final_clusters: usize,
    pub neighbor_count: NeighborCount,
    pub normalize: bool,
    pub epsilon: f64,
}

impl PipelineConfig {
    pub fn new(final_clusters: usize) -> PipelineConfig {
        PipelineConfig {
            final_clusters,
            neighbor_count: NeighborCount::Auto,
            normalize: false,
            epsilon: 1e-12,
        }
    }

    fn validate(&self, m: usize) -> Result<()> {
        if self.final_clusters < 1 {
            return Err(MocaError::InvalidParameter {
                name: "final_clusters",
                reason: "must be at least 1".into(),
            });
        }
        if self.final_clusters > m {
            return Err(MocaError::InvalidParameter {
                name: "final_clusters",
                reason: format!("{} exceeds dataset size {m}", self.final_clusters),
            });
        }
        if let NeighborCount::Fixed(l) = self.neighbor_count {
            if l < 1 || l > m - 1 {
                return Err(MocaError::InvalidParameter {
                    name: "L",
                    reason: format!("{l} outside valid interval [1, {}]", m - 1),
                });
            }
        }
        Ok(())
    }
}

/// What happened in one game round.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub round: usize,
    pub phi_before: f64,
    pub phi_after: f64,
    pub allocations: usize,
    pub dropouts: usize,
}

/// Mutable pipeline state threaded through the stages.
#[derive(Debug, Clone)]
pub struct PipelineState {
    pub round: usize,
    pub clustering: Clustering,
    /// Player indices (positions in the head list) still in the game.
    pub active: BTreeSet<usize>,
    pub trace: Vec<RoundRecord>,
    pub warnings: Vec<String>,
    /// φ after every accepted allocation, in acceptance order.
    pub phi_history: Vec<f64>,
}

/// Read-only inputs shared by every stage.
pub struct PipelineContext<'a> {
    pub data: &'a Dataset,
    pub dm: &'a DistanceMatrix,
    pub knn: &'a KnnTable,
    pub gravity: Vec<f64>,
}

impl<'a> PipelineContext<'a> {
    pub fn new(data: &'a Dataset, dm: &'a DistanceMatrix, knn: &'a KnnTable) -> Self {
        PipelineContext {
            data,
            dm,
            knn,
            gravity: gravity_center(data),
        }
    }
}

/// Neighbor-count schedule by dataset size, clamped to at most m-1.
pub fn choose_l(m: usize) -> usize {
    let l = if m < 150 {
        9
    } else if m <= 500 {
        14
    } else {
        28
    };
    l.min(m - 1)
}

/// Initial player count: floor(m/L), never below 2.
pub fn initial_player_count(m: usize, l: usize) -> usize {
    (m / l).max(2)
}

/// Picks up to `n0` cluster heads: repeatedly take the object with the
/// lowest dissimilarity over the surviving working set and eliminate
/// everything within Dmax/n0 of it. Ties break by ascending object index.
///
/// Dissimilarity is recomputed over the shrinking working set on every
/// pick; a global once-computed ranking concentrates all heads near the
/// dataset's center of mass and never reaches compact outlying groups.
pub fn identify_players(dm: &DistanceMatrix, n0: usize) -> Result<Vec<usize>> {
    if n0 < 1 {
        return Err(MocaError::InvalidParameter {
            name: "n0",
            reason: "must be at least 1".into(),
        });
    }
    let m = dm.len();
    let radius = dm.dmax() / n0 as f64;
    let mut alive: Vec<bool> = vec![true; m];
    let mut alive_count = m;
    let mut heads = Vec::new();
    while alive_count > 0 && heads.len() < n0 {
        // distance sums compare the same as means within one working set
        let sum_to_alive = |o: usize| {
            (0..m)
                .filter(|&j| alive[j] && j != o)
                .map(|j| dm.get(o, j))
                .sum::<f64>()
        };
        let pick = (0..m)
            .filter(|&o| alive[o])
            .min_by(|&a, &b| {
                sum_to_alive(a)
                    .partial_cmp(&sum_to_alive(b))
                    .unwrap()
                    .then(a.cmp(&b))
            })
            .unwrap();
        heads.push(pick);
        for (o, a) in alive.iter_mut().enumerate() {
            if *a && (o == pick || dm.get(o, pick) < radius) {
                *a = false;
                alive_count -= 1;
            }
        }
    }
    Ok(heads)
}

/// Builds one round's game: active players against the unassigned pool.
/// The cost of resource `e` for player `k` is the negated product of the
/// candidate cluster's connectivity and the R-square of the committed
/// clustering with `e` tentatively added to cluster `k`.
pub fn build_round_game(state: &PipelineState, ctx: &PipelineContext) -> Result<GameSpec> {
    let players: Vec<usize> = state.active.iter().copied().collect();
    let resources: Vec<usize> = state.clustering.unassigned.iter().copied().collect();
    if players.is_empty() || resources.is_empty() {
        return Err(MocaError::Internal(
            "round game built with no players or no resources".into(),
        ));
    }
    let m = ctx.data.len() as f64;
    let base_inter = inter_inertia(&state.clustering, ctx.data, &ctx.gravity);
    let base_intra = intra_inertia(&state.clustering, ctx.dm);

    let cost: Vec<f64> = players
        .par_iter()
        .flat_map_iter(|&k| {
            let cluster = &state.clustering.clusters[k];
            let head = cluster.head;
            let head_gap = ctx
                .data
                .row(head)
                .iter()
                .zip(&ctx.gravity)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>();
            resources.iter().map(move |&e| {
                // inertia deltas from tentatively adding e to cluster k
                let de = ctx.dm.get(e, head);
                let inter = base_inter + head_gap / m;
                let intra = base_intra + de * de / m;
                let r2 = if inter + intra > 0.0 { inter / (inter + intra) } else { 0.0 };
                let mut tentative = cluster.clone();
                tentative.members.insert(e);
                let connec = cluster_connectivity(&tentative, ctx.knn);
                -(connec * r2)
            })
        })
        .collect();
    GameSpec::new(players, resources, cost)
}

/// Commits the allocation when it strictly improves φ (beyond epsilon);
/// otherwise the player permanently leaves the game.
pub fn accept_if_enhances(
    state: &mut PipelineState,
    player: usize,
    resource: usize,
    ctx: &PipelineContext,
    epsilon: f64,
) -> bool {
    assert!(
        state.clustering.unassigned.contains(&resource),
        "resource {resource} already assigned"
    );
    let current = phi(&state.clustering, ctx.data, ctx.dm, ctx.knn);
    let mut candidate = state.clustering.clone();
    candidate.clusters[player].members.insert(resource);
    candidate.unassigned.remove(&resource);
    let improved = phi(&candidate, ctx.data, ctx.dm, ctx.knn);
    if improved > current + epsilon {
        state.clustering = candidate;
        state.phi_history.push(improved);
        true
    } else {
        state.active.remove(&player);
        false
    }
}

/// Runs game rounds until every object is assigned or every player has
/// left. Each round solves one equilibrium, verifies it, then processes
/// acceptances sequentially in player order.
pub fn play_rounds(state: &mut PipelineState, ctx: &PipelineContext, epsilon: f64) -> Result<()> {
    while !state.clustering.unassigned.is_empty() && !state.active.is_empty() {
        state.round += 1;
        let phi_before = phi(&state.clustering, ctx.data, ctx.dm, ctx.knn);
        let game = build_round_game(state, ctx)?;
        let eq = solve_equilibrium(&game)?;
        let (sound, witness) = verify_equilibrium(&game, &eq.profile);
        if !sound {
            return Err(MocaError::Internal(format!(
                "solver returned a non-equilibrium profile, violation at {witness:?}"
            )));
        }
        let mut allocations = 0usize;
        let mut dropouts = 0usize;
        for (idx, &player) in game.players().iter().enumerate() {
            match eq.profile.choice[idx] {
                // resource shortage is not a quality judgment; retry next round
                None => continue,
                Some(r) => {
                    let resource = game.resources()[r];
                    if accept_if_enhances(state, player, resource, ctx, epsilon) {
                        allocations += 1;
                    } else {
                        dropouts += 1;
                    }
                }
            }
        }
        state.trace.push(RoundRecord {
            round: state.round,
            phi_before,
            phi_after: phi(&state.clustering, ctx.data, ctx.dm, ctx.knn),
            allocations,
            dropouts,
        });
    }
    Ok(())
}

fn single_linkage(a: &Clustering, i: usize, j: usize, dm: &DistanceMatrix) -> f64 {
    let mut best = f64::INFINITY;
    for &x in &a.clusters[i].members {
        for &y in &a.clusters[j].members {
            best = best.min(dm.get(x, y));
        }
    }
    best
}

/// Merges the closest cluster pair (single linkage) until `f` clusters
/// remain. The merged cluster keeps the larger constituent's head and the
/// lower cluster index.
pub fn merge_clusters(state: &mut PipelineState, dm: &DistanceMatrix, f: usize) -> Result<()> {
    if f < 1 {
        return Err(MocaError::InvalidParameter {
            name: "final_clusters",
            reason: "must be at least 1".into(),
        });
    }
    while state.clustering.clusters.len() > f {
        let k = state.clustering.clusters.len();
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..k {
            for j in i + 1..k {
                let d = single_linkage(&state.clustering, i, j, dm);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        let (_, i, j) = best.unwrap();
        let absorbed = state.clustering.clusters.remove(j);
        let target = &mut state.clustering.clusters[i];
        if absorbed.members.len() > target.members.len() {
            target.head = absorbed.head;
        }
        target.members.extend(absorbed.members);
    }
    Ok(())
}

/// Attaches every unassigned object to the cluster of its nearest assigned
/// object, in ascending object id; each assignment is visible to the next.
pub fn assign_leftovers(state: &mut PipelineState, dm: &DistanceMatrix) -> Result<()> {
    if state.clustering.clusters.is_empty() {
        return Err(MocaError::Internal("no clusters to assign leftovers to".into()));
    }
    let leftovers: Vec<usize> = state.clustering.unassigned.iter().copied().collect();
    for o in leftovers {
        let mut best: Option<(f64, usize)> = None;
        for (ci, c) in state.clustering.clusters.iter().enumerate() {
            for &member in &c.members {
                let d = dm.get(o, member);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, ci));
                }
            }
        }
        let (_, ci) = best.unwrap();
        state.clustering.clusters[ci].members.insert(o);
        state.clustering.unassigned.remove(&o);
    }
    Ok(())
}

/// Everything a full run produces: the final partition plus the state trace.
#[derive(Debug, Clone)]
pub struct MocaOutcome {
    pub clustering: Clustering,
    pub heads: Vec<usize>,
    pub l: usize,
    pub n0: usize,
    pub state: PipelineState,
}

/// Runs the whole algorithm end to end. Deterministic for identical inputs.
pub fn run_moca(data: &Dataset, config: &PipelineConfig) -> Result<MocaOutcome> {
    config.validate(data.len())?;
    let normalized;
    let data = if config.normalize {
        normalized = data.min_max_normalize();
        &normalized
    } else {
        data
    };
    let m = data.len();
    let dm = DistanceMatrix::build(data);
    let l = match config.neighbor_count {
        NeighborCount::Auto => choose_l(m),
        NeighborCount::Fixed(l) => l,
    };
    let knn = KnnTable::build(&dm, l)?;
    let n0 = initial_player_count(m, l);
    let heads = identify_players(&dm, n0)?;

    let mut state = PipelineState {
        round: 0,
        clustering: Clustering::from_heads(&heads, m),
        active: (0..heads.len()).collect(),
        trace: Vec::new(),
        warnings: Vec::new(),
        phi_history: Vec::new(),
    };
    if config.final_clusters > heads.len() {
        state.warnings.push(format!(
            "requested {} clusters but only {} initial players formed; output keeps {}",
            config.final_clusters,
            heads.len(),
            heads.len()
        ));
    }

    let ctx = PipelineContext::new(data, &dm, &knn);
    play_rounds(&mut state, &ctx, config.epsilon)?;
    merge_clusters(&mut state, &dm, config.final_clusters)?;
    assign_leftovers(&mut state, &dm)?;

    debug_assert!(state.clustering.is_valid(m));
    Ok(MocaOutcome {
        clustering: state.clustering.clone(),
        heads,
        l,
        n0,
        state,
    })
}
