//! One round's singleton congestion game with player-specific costs.
//!
//! Every player picks exactly one resource; a resource chosen by more than
//! one player costs +∞, so at equilibrium no resource is shared. The solver
//! inserts players one by one and then runs round-robin best-response sweeps;
//! under the two-valued cost structure every improving move strictly lowers
//! the mover's cost and leaves everyone else untouched, so the dynamics
//! terminate.

use crate::error::{MocaError, Result};

/// Immutable description of one game: ordered players, ordered resources,
/// and the finite cost each player pays for each resource at congestion 1.
#[derive(Debug, Clone)]
pub struct GameSpec {
    players: Vec<usize>,
    resources: Vec<usize>,
    /// Row-major players x resources, congestion-1 costs only.
    cost: Vec<f64>,
}

impl GameSpec {
    pub fn new(players: Vec<usize>, resources: Vec<usize>, cost: Vec<f64>) -> Result<GameSpec> {
        if players.is_empty() {
            return Err(MocaError::InvalidParameter {
                name: "players",
                reason: "must be non-empty".into(),
            });
        }
        if resources.is_empty() {
            return Err(MocaError::InvalidParameter {
                name: "resources",
                reason: "must be non-empty".into(),
            });
        }
        if cost.len() != players.len() * resources.len() {
            return Err(MocaError::InvalidParameter {
                name: "cost",
                reason: format!(
                    "table has {} entries, expected {}x{}",
                    cost.len(),
                    players.len(),
                    resources.len()
                ),
            });
        }
        if cost.iter().any(|c| !c.is_finite()) {
            return Err(MocaError::InvalidParameter {
                name: "cost",
                reason: "all stored costs must be finite".into(),
            });
        }
        Ok(GameSpec { players, resources, cost })
    }

    pub fn players(&self) -> &[usize] {
        &self.players
    }

    pub fn resources(&self) -> &[usize] {
        &self.resources
    }

    #[inline]
    fn stored_cost(&self, player_idx: usize, resource_idx: usize) -> f64 {
        self.cost[player_idx * self.resources.len() + resource_idx]
    }

    /// Cost of `resource` for `player` at the given congestion: the stored
    /// finite value at congestion 1, +∞ for any shared resource.
    /// Panics on congestion 0 (a chosen resource always has n_e >= 1).
    pub fn cost_of(&self, player_idx: usize, resource_idx: usize, congestion: usize) -> f64 {
        assert!(congestion >= 1, "cost queried at congestion 0");
        if congestion > 1 {
            f64::INFINITY
        } else {
            self.stored_cost(player_idx, resource_idx)
        }
    }
}

/// A resource choice per player (indices into the game's resource list)
/// plus the congestion tally. `None` means the player holds no resource.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProfile {
    pub choice: Vec<Option<usize>>,
    pub congestion: Vec<usize>,
}

impl StrategyProfile {
    pub fn empty(game: &GameSpec) -> StrategyProfile {
        StrategyProfile {
            choice: vec![None; game.players().len()],
            congestion: vec![0; game.resources().len()],
        }
    }

    /// True when the congestion vector matches the tally of choices.
    pub fn is_consistent(&self, game: &GameSpec) -> bool {
        let mut tally = vec![0usize; game.resources().len()];
        for c in self.choice.iter().flatten() {
            if *c >= tally.len() {
                return false;
            }
            tally[*c] += 1;
        }
        tally == self.congestion
    }

    fn realized_cost_sum(&self, game: &GameSpec) -> f64 {
        self.choice
            .iter()
            .enumerate()
            .filter_map(|(p, c)| c.map(|r| game.cost_of(p, r, self.congestion[r])))
            .sum()
    }
}

/// Outcome of best-response dynamics: the final profile, the number of
/// moves, and the sum of realized costs after each move.
#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub profile: StrategyProfile,
    pub moves: usize,
    pub cost_trace: Vec<f64>,
}

/// The cost-minimizing resource for `player` given everyone else's fixed
/// choices: argmin over free resources plus the player's current one, ties
/// broken by ascending resource index. `None` when no finite option exists.
pub fn best_response(game: &GameSpec, profile: &StrategyProfile, player: usize) -> Option<usize> {
    let current = profile.choice[player];
    let mut best: Option<(usize, f64)> = None;
    for r in 0..game.resources().len() {
        let free = profile.congestion[r] == 0 || current == Some(r) && profile.congestion[r] == 1;
        if !free {
            continue;
        }
        let c = game.cost_of(player, r, 1);
        match best {
            Some((_, bc)) if c >= bc => {}
            _ => best = Some((r, c)),
        }
    }
    best.map(|(r, _)| r)
}

/// Finds a pure Nash equilibrium by player insertion followed by round-robin
/// best-response sweeps. Deterministic for a given game. Players beyond the
/// resource supply end up with no resource.
pub fn solve_equilibrium(game: &GameSpec) -> Result<EquilibriumResult> {
    let n_players = game.players().len();
    let move_cap = n_players * game.resources().len();
    let mut profile = StrategyProfile::empty(game);
    let mut moves = 0usize;
    let mut cost_trace = Vec::new();

    let apply = |profile: &mut StrategyProfile,
                     player: usize,
                     target: usize,
                     moves: &mut usize,
                     cost_trace: &mut Vec<f64>|
     -> Result<()> {
        if let Some(old) = profile.choice[player] {
            profile.congestion[old] -= 1;
        }
        profile.choice[player] = Some(target);
        profile.congestion[target] += 1;
        *moves += 1;
        if *moves > move_cap {
            return Err(MocaError::Internal(format!(
                "best-response dynamics exceeded {move_cap} moves"
            )));
        }
        cost_trace.push(profile.realized_cost_sum(game));
        Ok(())
    };

    // insertion pass, players in list order
    for p in 0..n_players {
        if let Some(r) = best_response(game, &profile, p) {
            apply(&mut profile, p, r, &mut moves, &mut cost_trace)?;
        }
    }

    // round-robin sweeps until a full sweep makes no move
    loop {
        let mut moved = false;
        for p in 0..n_players {
            let current_cost = profile.choice[p]
                .map(|r| game.cost_of(p, r, profile.congestion[r]))
                .unwrap_or(f64::INFINITY);
            if let Some(r) = best_response(game, &profile, p) {
                if game.cost_of(p, r, 1) < current_cost {
                    apply(&mut profile, p, r, &mut moves, &mut cost_trace)?;
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }

    Ok(EquilibriumResult { profile, moves, cost_trace })
}

/// Exhaustively checks every unilateral deviation. Returns the first
/// violating (player index, resource index) if the profile is not an
/// equilibrium.
pub fn verify_equilibrium(
    game: &GameSpec,
    profile: &StrategyProfile,
) -> (bool, Option<(usize, usize)>) {
    for p in 0..game.players().len() {
        let current_cost = match profile.choice[p] {
            Some(r) => game.cost_of(p, r, profile.congestion[r]),
            // an idle player deviates to any free resource it would want
            None => f64::INFINITY,
        };
        for r in 0..game.resources().len() {
            if profile.choice[p] == Some(r) {
                continue;
            }
            let deviated = game.cost_of(p, r, profile.congestion[r] + 1);
            if deviated < current_cost {
                return (false, Some((p, r)));
            }
        }
    }
    (true, None)
}
