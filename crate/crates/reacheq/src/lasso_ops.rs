//! Play rewrites and consistency checking.
//!
//! Two rewrites shorten ultimately periodic plays while controlling costs:
//!
//! * [`apply_p1`] removes a cycle between two positions that carry the same
//!   vertex and the same set of visited players. No cost ever increases.
//! * [`apply_p2`] re-closes a play into a lasso whose prefix contains every
//!   first target visit, cycling at the first vertex repetition after the
//!   last of them. The cost profile is preserved exactly.
//!
//! [`normalize`] exhausts the first rewrite (leftmost, then innermost) and
//! closes with the second; the result has length at most
//! `(players + 1) * |V|` and every finite cost at most `players * |V|`.
//!
//! A labeling assigns every vertex a bound; a play is *consistent* with it
//! when, at every position whose owner has not visited their target set yet,
//! the residual cost of the owner stays within the bound ([`lambda_consistent`];
//! in qualitative games a finite bound means the owner must still visit).
//! Consistent plays are exactly the outcomes that the equilibrium
//! characterizations accept.

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::format::Labeling;
use crate::game::{Game, Lasso, Mode, Player, PlayerSet, VertexId};

/// Cost of `player` in the suffix of the play starting at `position`:
/// number of steps from there to the next visit of their target set.
pub fn residual_cost(game: &Game, lasso: &Lasso, position: usize, player: Player) -> Cost {
    let horizon = position + lasso.len() + lasso.cycle.len() + 1;
    for t in position..horizon {
        if game.arena.is_target(lasso.vertex_at(t), player) {
            return Cost::Finite((t - position) as u64);
        }
    }
    Cost::Infinite
}

/// One position at which a play oversteps a labeling.
#[derive(Clone, Debug)]
pub struct Violation {
    pub position: usize,
    pub vertex: VertexId,
    pub player: Player,
    pub residual: Cost,
    pub bound: Cost,
}

/// Result of a consistency check; `violation` is the first offending
/// position when inconsistent.
#[derive(Clone, Debug)]
pub struct Consistency {
    pub consistent: bool,
    pub violation: Option<Violation>,
}

/// Checks the play against the labeling: at every position owned by a
/// player who has not visited their target set yet, the owner's residual
/// cost must stay within the label of the current vertex (quantitative), or
/// must be finite whenever the label is (qualitative). Checking one full
/// traversal of the lasso suffices: later cycle iterations repeat the same
/// suffixes with fewer active constraints.
pub fn lambda_consistent(game: &Game, labeling: &Labeling, lasso: &Lasso) -> Result<Consistency> {
    lasso.validate(game)?;
    let mut visited = PlayerSet::EMPTY;
    for position in 0..lasso.len() {
        let vertex = lasso.vertex_at(position);
        visited = visited.union(game.arena.targets_at(vertex));
        let player = game.arena.owner(vertex);
        if visited.contains(player) {
            continue;
        }
        let bound = labeling.get(game, vertex)?;
        let residual = residual_cost(game, lasso, position, player);
        let violated = match game.mode {
            Mode::Quantitative => residual > bound,
            Mode::Qualitative => bound.is_finite() && !residual.is_finite(),
        };
        if violated {
            return Ok(Consistency {
                consistent: false,
                violation: Some(Violation {
                    position,
                    vertex,
                    player,
                    residual,
                    bound,
                }),
            });
        }
    }
    Ok(Consistency {
        consistent: true,
        violation: None,
    })
}

/// Visited-players set after each position of the first `n` positions.
fn visit_prefixes(game: &Game, lasso: &Lasso, n: usize) -> Vec<PlayerSet> {
    let mut out = Vec::with_capacity(n);
    let mut seen = PlayerSet::EMPTY;
    for t in 0..n {
        seen = seen.union(game.arena.targets_at(lasso.vertex_at(t)));
        out.push(seen);
    }
    out
}

/// Position of the last first-visit of the play, if any player visits.
fn last_first_visit(game: &Game, lasso: &Lasso) -> Option<usize> {
    let n = lasso.len();
    let mut seen = PlayerSet::EMPTY;
    let mut last = None;
    for t in 0..n {
        let grown = seen.union(game.arena.targets_at(lasso.vertex_at(t)));
        if grown != seen {
            last = Some(t);
            seen = grown;
        }
    }
    last
}

/// Removes the part of the play between positions `k` (kept) and `m`
/// (dropped) — legal when both positions carry the same vertex and the same
/// set of already-visited players, so that the removed part is a cycle no
/// player needs. Costs can only decrease.
pub fn apply_p1(game: &Game, lasso: &Lasso, k: usize, m: usize) -> Result<Lasso> {
    lasso.validate(game)?;
    if k >= m {
        return Err(Error::NotRemovableCycle {
            k,
            m,
            reason: "positions must satisfy k < m".to_string(),
        });
    }
    let vk = lasso.vertex_at(k);
    let vm = lasso.vertex_at(m);
    if vk != vm {
        return Err(Error::NotRemovableCycle {
            k,
            m,
            reason: format!(
                "vertices differ (`{}` vs `{}`)",
                game.arena.name(vk),
                game.arena.name(vm)
            ),
        });
    }
    let prefixes = visit_prefixes(game, lasso, m + 1);
    if prefixes[k] != prefixes[m] {
        return Err(Error::NotRemovableCycle {
            k,
            m,
            reason: format!(
                "a target is first visited inside: visited {} vs {}",
                prefixes[k], prefixes[m]
            ),
        });
    }
    let p = lasso.prefix.len();
    let c = lasso.cycle.len();
    let out = if m < p {
        // Entirely inside the prefix.
        let mut prefix = lasso.prefix[..=k].to_vec();
        prefix.extend_from_slice(&lasso.prefix[m + 1..]);
        Lasso::new(prefix, lasso.cycle.clone())
    } else {
        // The play continues from position m+1, which lies in the periodic
        // part: keep positions 0..=k and restart the cycle at that phase.
        let prefix = lasso.window(k + 1);
        let phase = (m + 1 - p) % c;
        let mut cycle = lasso.cycle[phase..].to_vec();
        cycle.extend_from_slice(&lasso.cycle[..phase]);
        Lasso::new(prefix, cycle)
    };
    debug_assert!(out.validate(game).is_ok());
    Ok(out)
}

/// Re-closes the play so that every first visit lies in the prefix: copies
/// the play until the last first-visit, then cycles at the first vertex
/// repetition occurring strictly after it. Cost profile and visited set are
/// unchanged.
pub fn apply_p2(game: &Game, lasso: &Lasso) -> Lasso {
    let base = match last_first_visit(game, lasso) {
        Some(l) => l + 1,
        None => 0,
    };
    let mut first_at: std::collections::HashMap<VertexId, usize> = Default::default();
    let mut m = base;
    let k = loop {
        let v = lasso.vertex_at(m);
        if let Some(&k) = first_at.get(&v) {
            break k;
        }
        first_at.insert(v, m);
        m += 1;
    };
    let out = Lasso::new(lasso.window(k), lasso.window(m)[k..].to_vec());
    debug_assert!(out.validate(game).is_ok());
    debug_assert_eq!(
        crate::game::cost_or_gain_profile(game, lasso),
        crate::game::cost_or_gain_profile(game, &out)
    );
    out
}

/// The cycle-removal steps taken by [`normalize`], replayable with
/// [`replay_trace`].
#[derive(Clone, Debug, Default)]
pub struct NormalizationTrace {
    /// `(k, m)` arguments of successive [`apply_p1`] calls; the final
    /// [`apply_p2`] takes no arguments.
    pub removals: Vec<(usize, usize)>,
}

/// Shortens the play into its normal form: removes needless cycles that end
/// at or before the last first-visit (leftmost end first, innermost pair for
/// that end), then re-closes with [`apply_p2`]. The result visits the same
/// players, costs at most as much per player, has length at most
/// `(players + 1) * |V|`, and every finite cost is at most `players * |V|`.
pub fn normalize(game: &Game, lasso: &Lasso) -> Result<(Lasso, NormalizationTrace)> {
    lasso.validate(game)?;
    let mut cur = lasso.clone();
    let mut trace = NormalizationTrace::default();
    loop {
        let Some(last_visit) = last_first_visit(game, &cur) else {
            break;
        };
        let prefixes = visit_prefixes(game, &cur, last_visit + 1);
        let window = cur.window(last_visit + 1);
        let mut found = None;
        'scan: for m in 1..=last_visit {
            for k in (0..m).rev() {
                if window[k] == window[m] && prefixes[k] == prefixes[m] {
                    found = Some((k, m));
                    break 'scan;
                }
            }
        }
        match found {
            Some((k, m)) => {
                cur = apply_p1(game, &cur, k, m).expect("scanned pair is removable");
                trace.removals.push((k, m));
            }
            None => break,
        }
    }
    Ok((apply_p2(game, &cur), trace))
}

/// Replays a normalization trace step by step.
pub fn replay_trace(game: &Game, lasso: &Lasso, trace: &NormalizationTrace) -> Result<Lasso> {
    let mut cur = lasso.clone();
    for &(k, m) in &trace.removals {
        cur = apply_p1(game, &cur, k, m)?;
    }
    Ok(apply_p2(game, &cur))
}

/// Re-closes without removing any cycle. Used for threshold queries with
/// lower bounds, where dropping a cycle could push a cost below its bound;
/// the closed form preserves the profile exactly and has length at most
/// `last first-visit + |V| + 1`.
pub fn normalize_p2_only(game: &Game, lasso: &Lasso) -> Lasso {
    apply_p2(game, lasso)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_game, parse_lasso};
    use crate::game::cost_or_gain_profile;

    fn game() -> Game {
        parse_game(
            "game quantitative\nplayers 2\n\
             vertex a owner=1\nvertex b owner=2\nvertex t owner=1 targets=1\n\
             vertex u owner=2 targets=2\n\
             edge a b\nedge b a\nedge a t\nedge t u\nedge u a\nedge u u\ninit a\n",
        )
        .unwrap()
    }

    #[test]
    fn p1_removes_a_detour_and_costs_drop() {
        let g = game();
        // a b a t (u)^ω : positions 0 and 2 are both `a` with nothing
        // visited in between.
        let l = parse_lasso(&g, "a b a t | u").unwrap();
        let before = cost_or_gain_profile(&g, &l);
        let out = apply_p1(&g, &l, 0, 2).unwrap();
        let after = cost_or_gain_profile(&g, &out);
        assert_eq!(format!("{}", out.display(&g)), "a t | u");
        assert!(after.leq(&before));
    }

    #[test]
    fn p1_rejects_cycles_that_visit() {
        let g = game();
        // a t u a t (u)^ω: the loop between positions 0 and 3 visits both
        // players.
        let l = parse_lasso(&g, "a t u a t | u").unwrap();
        match apply_p1(&g, &l, 0, 3) {
            Err(Error::NotRemovableCycle { .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        // And mismatched vertices are rejected too.
        assert!(apply_p1(&g, &l, 0, 1).is_err());
    }

    #[test]
    fn p2_preserves_profiles_and_puts_visits_in_prefix() {
        let g = game();
        let l = parse_lasso(&g, "| a t u").unwrap();
        let out = apply_p2(&g, &l);
        assert_eq!(
            cost_or_gain_profile(&g, &l),
            cost_or_gain_profile(&g, &out)
        );
        // Visits happen at positions 1 and 2; the cycle must start later.
        assert!(out.prefix.len() >= 3);
        assert_eq!(
            crate::game::visit_set(&g, &Lasso::new(out.prefix.clone(), vec![out.cycle[0]])),
            crate::game::visit_set(&g, &out),
        );
    }

    #[test]
    fn normalize_replay_matches() {
        let g = game();
        let l = parse_lasso(&g, "a b a b a t | u").unwrap();
        let (normal, trace) = normalize(&g, &l).unwrap();
        assert!(!trace.removals.is_empty());
        assert_eq!(replay_trace(&g, &l, &trace).unwrap(), normal);
        assert!(normal.len() <= g.lasso_bound());
        let p = cost_or_gain_profile(&g, &normal);
        assert!(p.leq(&cost_or_gain_profile(&g, &l)));
    }

    #[test]
    fn consistency_reports_first_violation() {
        let g = game();
        // Label vertex a with 1: the owner (player 1) must visit within one
        // step of every `a` they see before visiting.
        let mut labels = vec![Some(Cost::Infinite); g.n_vertices()];
        labels[g.arena.vertex_id("a").unwrap()] = Some(Cost::Finite(1));
        let labeling = Labeling(labels);
        let bad = parse_lasso(&g, "a b a t | u").unwrap();
        let res = lambda_consistent(&g, &labeling, &bad).unwrap();
        assert!(!res.consistent);
        let v = res.violation.unwrap();
        assert_eq!(v.position, 0);
        assert_eq!(v.residual, Cost::Finite(3));
        let good = parse_lasso(&g, "a t | u").unwrap();
        assert!(lambda_consistent(&g, &labeling, &good).unwrap().consistent);
    }

    #[test]
    fn consistency_is_stable_under_unrolling() {
        let g = game();
        let labeling = crate::values::val_labeling(&g).unwrap();
        for text in ["a t | u", "a b | a t u", "| a t u"] {
            let l = parse_lasso(&g, text).unwrap();
            let mut unrolled_prefix = l.prefix.clone();
            unrolled_prefix.extend_from_slice(&l.cycle);
            let unrolled = Lasso::new(unrolled_prefix, l.cycle.clone());
            assert_eq!(
                lambda_consistent(&g, &labeling, &l).unwrap().consistent,
                lambda_consistent(&g, &labeling, &unrolled)
                    .unwrap()
                    .consistent,
                "lasso {text}"
            );
        }
    }
}
