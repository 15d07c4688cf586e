//! Coalitional values: what one player can guarantee against all others.
//!
//! For each player `i` the game is viewed as a two-player zero-sum
//! reachability game: `i` (Min) steers their own vertices and tries to reach
//! their target set as fast as possible, the coalition of everyone else
//! (Max) steers all remaining vertices and tries to delay or prevent the
//! visit. Values and positional optimal strategies for both sides exist and
//! are computed by value iteration.
//!
//! Labeling every vertex with the value of its owner's coalitional game
//! yields the consistency bound used by the equilibrium characterizations.

use crate::cost::Cost;
use crate::error::Result;
use crate::format::Labeling;
use crate::game::{Game, Mode, Player, VertexId};

/// Values and positional strategies of one coalitional game.
#[derive(Clone, Debug)]
pub struct Coalitional {
    pub player: Player,
    /// `values[v]`: steps within which the player can force a visit of their
    /// target set from `v`, against the coalition; `+∞` if they cannot.
    pub values: Vec<Cost>,
    /// Optimal choice at the player's own vertices.
    pub min_choice: Vec<Option<VertexId>>,
    /// Optimal choice at coalition vertices (delay / avoid the target).
    pub max_choice: Vec<Option<VertexId>>,
    /// Synchronous sweeps until the iteration stabilized.
    pub rounds: usize,
}

/// Value iteration for the coalitional game of `player`, descending from
/// all-`+∞`. Ties between successors are broken by the smallest vertex name
/// (successor lists are name-sorted).
pub fn quant_values(game: &Game, player: Player) -> Coalitional {
    let n = game.n_vertices();
    let mut values: Vec<Cost> = (0..n)
        .map(|v| {
            if game.arena.is_target(v, player) {
                Cost::ZERO
            } else {
                Cost::Infinite
            }
        })
        .collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut next = values.clone();
        let mut changed = false;
        for v in 0..n {
            if game.arena.is_target(v, player) {
                continue;
            }
            let candidates = game.arena.succ(v).iter().map(|&w| values[w].plus(1));
            let best = if game.arena.owner(v) == player {
                candidates.min().unwrap()
            } else {
                candidates.max().unwrap()
            };
            if best != next[v] {
                next[v] = best;
                changed = true;
            }
        }
        values = next;
        if !changed {
            break;
        }
    }
    let mut min_choice = vec![None; n];
    let mut max_choice = vec![None; n];
    for v in 0..n {
        let pick = |want_min: bool| -> VertexId {
            let mut best: Option<(Cost, VertexId)> = None;
            for &w in game.arena.succ(v) {
                let c = values[w];
                let better = match best {
                    None => true,
                    Some((b, _)) => {
                        if want_min {
                            c < b
                        } else {
                            c > b
                        }
                    }
                };
                if better {
                    best = Some((c, w));
                }
            }
            best.unwrap().1
        };
        if game.arena.owner(v) == player {
            min_choice[v] = Some(pick(true));
        } else {
            max_choice[v] = Some(pick(false));
        }
    }
    Coalitional {
        player,
        values,
        min_choice,
        max_choice,
        rounds,
    }
}

/// Attractor of `player` towards their target set: the vertices from which
/// they can force a visit regardless of the coalition. Equals the set of
/// vertices with finite [`quant_values`] value; computed here by the direct
/// backward fixpoint, which doubles as a cross-check.
pub fn qual_attractor(game: &Game, player: Player) -> Coalitional {
    let n = game.n_vertices();
    let mut rank: Vec<Option<usize>> = (0..n)
        .map(|v| {
            if game.arena.is_target(v, player) {
                Some(0)
            } else {
                None
            }
        })
        .collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        for v in 0..n {
            if rank[v].is_some() {
                continue;
            }
            let mine = game.arena.owner(v) == player;
            let reached = if mine {
                game.arena.succ(v).iter().any(|&w| rank[w].is_some())
            } else {
                game.arena.succ(v).iter().all(|&w| rank[w].is_some())
            };
            if reached {
                rank[v] = Some(rounds);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut min_choice = vec![None; n];
    let mut max_choice = vec![None; n];
    for v in 0..n {
        if game.arena.owner(v) == player {
            // Decrease the attractor rank when inside, anything otherwise.
            let w = game
                .arena
                .succ(v)
                .iter()
                .copied()
                .min_by_key(|&w| rank[w].unwrap_or(usize::MAX))
                .unwrap();
            min_choice[v] = Some(w);
        } else {
            // Stay outside the attractor whenever possible.
            let w = game
                .arena
                .succ(v)
                .iter()
                .copied()
                .find(|&w| rank[w].is_none())
                .unwrap_or_else(|| game.arena.succ(v)[0]);
            max_choice[v] = Some(w);
        }
    }
    let values = rank
        .iter()
        .map(|r| {
            if r.is_some() {
                Cost::ZERO
            } else {
                Cost::Infinite
            }
        })
        .collect();
    Coalitional {
        player,
        values,
        min_choice,
        max_choice,
        rounds,
    }
}

/// The coalitional view matching the game mode: exact step values in
/// quantitative games, win/lose (0 / `+∞`) in qualitative games.
pub fn coalitional(game: &Game, player: Player) -> Coalitional {
    match game.mode {
        Mode::Quantitative => quant_values(game, player),
        Mode::Qualitative => qual_attractor(game, player),
    }
}

/// Labels every vertex with the coalitional value of its owner: the bound
/// that any deviation-proof play must honor at that vertex.
pub fn val_labeling(game: &Game) -> Result<Labeling> {
    let per_player: Vec<Coalitional> = (0..game.players()).map(|p| coalitional(game, p)).collect();
    let values = (0..game.n_vertices())
        .map(|v| per_player[game.arena.owner(v)].values[v])
        .collect();
    Ok(Labeling::total(values))
}
