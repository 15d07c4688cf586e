//! Deviation-proof plays: decision problems and strategy synthesis.
//!
//! A play from the initial vertex is an equilibrium outcome exactly when it
//! is consistent with the coalitional value labeling ([`crate::values`]): at
//! every position whose owner has not been served yet, the owner's residual
//! cost stays within what they could force on their own from that vertex.
//! This reduces every decision problem over equilibrium outcomes to a sweep
//! over finitely many short plays:
//!
//! * every outcome can be rewritten ([`crate::lasso_ops::normalize`]) into a
//!   consistent play of length at most `(players + 1) * |V|` without raising
//!   any cost, so upper-bounded queries sweep plays up to that length;
//! * lower bounds in quantitative games may force long detours, so those
//!   sweeps keep dawdling plays and extend the horizon to the largest finite
//!   bound plus `|V|`.
//!
//! The sweep enumerates plays whose walk never repeats a (vertex, visited
//! players) pair, except the single repeat that a normalized play may carry
//! at its last first-visit position; this keeps the walk space near the
//! simple paths of the visit-tracking product without losing any normalized
//! play. Quantitative sweeps additionally drop play prefixes that already
//! overstep a deadline imposed by the labeling, and prefixes whose fixed
//! costs already violate an upper threshold.
//!
//! A yes verdict is always backed by a witness play and one strategy machine
//! per player: the machines replay the witness and, on the first mismatch,
//! lock into punishing the player who moved last — everyone else switches to
//! the coalition's value-optimal positional strategy against the deviator.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::format::Labeling;
use crate::game::{
    cost_or_gain_profile, search_lassoes_pruned, social_welfare, Game, Lasso, Mode, Player,
    PlayerSet, Profile, Search, VertexId, Welfare,
};
use crate::lasso_ops::{lambda_consistent, Consistency};
use crate::machine::{MachineProfile, StrategyMachine};
use crate::values::{coalitional, val_labeling, Coalitional};

/// Hard cap on the number of walk extensions one sweep may explore before
/// giving up with [`Error::SizeCap`].
const SWEEP_CAP: usize = 4_000_000;

/// One side of a per-player threshold: the value compared against and
/// whether the comparison is strict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bound {
    pub value: Cost,
    pub strict: bool,
}

impl Bound {
    pub fn new(value: Cost) -> Bound {
        Bound {
            value,
            strict: false,
        }
    }

    pub fn strict(value: Cost) -> Bound {
        Bound {
            value,
            strict: true,
        }
    }

    /// Does `x` stay below this bound (used as an upper threshold)?
    pub fn admits_upper(&self, x: Cost) -> bool {
        if self.strict {
            x < self.value
        } else {
            x <= self.value
        }
    }

    /// Does `x` stay above this bound (used as a lower threshold)?
    pub fn admits_lower(&self, x: Cost) -> bool {
        if self.strict {
            x > self.value
        } else {
            x >= self.value
        }
    }
}

/// Parses a cost literal: a non-negative integer or `inf`.
pub fn parse_cost_text(s: &str) -> Result<Cost> {
    if s == "inf" {
        Ok(Cost::Infinite)
    } else {
        s.parse::<u64>()
            .map(Cost::Finite)
            .map_err(|_| Error::BadQuery(format!("expected a number or `inf`, found `{s}`")))
    }
}

/// Parses a comma-separated bound list, one entry per player: `-` for no
/// constraint, a cost for a large bound, a cost with suffix `<` for a
/// strict one (e.g. `6,3<,-,inf`).
pub fn parse_bounds(s: &str, players: usize, which: &str) -> Result<Vec<Option<Bound>>> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != players {
        return Err(Error::BadQuery(format!(
            "--{which} lists {} bounds, the game has {players} players",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|raw| {
            let p = raw.trim();
            if p == "-" {
                return Ok(None);
            }
            let (value, strict) = match p.strip_suffix('<') {
                Some(v) => (v, true),
                None => (p, false),
            };
            let cost = parse_cost_text(value)?;
            Ok(Some(if strict {
                Bound::strict(cost)
            } else {
                Bound::new(cost)
            }))
        })
        .collect()
}

/// A decision problem over equilibrium outcomes.
#[derive(Clone, Debug)]
pub enum Query {
    /// Is there an outcome whose profile meets every per-player bound?
    /// Unset entries are unconstrained. In qualitative games the bounds
    /// apply to gains (0 or 1) instead of costs.
    Threshold {
        upper: Vec<Option<Bound>>,
        lower: Vec<Option<Bound>>,
    },
    /// Is there an outcome whose social welfare is at least as good as
    /// (`visitors`, `total`) — strictly more visitors, or as many visitors
    /// with a summed cost of at most `total`?
    Welfare { visitors: usize, total: Cost },
    /// Is there an outcome whose profile is Pareto-optimal among the
    /// profiles of *all* plays of the game?
    Pareto,
}

/// Decision result, together with the evidence backing a yes.
#[derive(Clone, Debug, Default)]
pub struct Verdict {
    pub yes: bool,
    /// Witness play (present exactly on yes).
    pub lasso: Option<Lasso>,
    /// Cost (or gain) profile of the witness.
    pub profile: Option<Profile>,
    /// Social welfare of the witness, or for welfare queries the best
    /// welfare any outcome achieves (also on a no).
    pub welfare: Option<Welfare>,
    /// The Pareto front of all plays (Pareto queries only).
    pub front: Option<Vec<Profile>>,
    /// Witness strategy machines, one per player (present exactly on yes).
    pub machines: Option<MachineProfile>,
}

impl Verdict {
    fn no() -> Verdict {
        Verdict::default()
    }
}

/// The value a threshold constrains: the raw cost in quantitative games,
/// the gain (0 or 1) in qualitative games.
fn threshold_value(mode: Mode, cost: Cost) -> Cost {
    match mode {
        Mode::Quantitative => cost,
        Mode::Qualitative => Cost::Finite(cost.gain() as u64),
    }
}

fn meets_threshold(
    mode: Mode,
    profile: &Profile,
    upper: &[Option<Bound>],
    lower: &[Option<Bound>],
) -> bool {
    for (i, &cost) in profile.0.iter().enumerate() {
        let x = threshold_value(mode, cost);
        if let Some(b) = upper[i] {
            if !b.admits_upper(x) {
                return false;
            }
        }
        if let Some(b) = lower[i] {
            if !b.admits_lower(x) {
                return false;
            }
        }
    }
    true
}

/// Is `w` at least as good as the welfare target (`visitors`, `total`)?
fn welfare_at_least(w: Welfare, visitors: usize, total: Cost) -> bool {
    w.visitors > visitors
        || (w.visitors == visitors
            && match total {
                Cost::Infinite => true,
                Cost::Finite(c) => w.total <= c,
            })
}

fn validate_query(game: &Game, query: &Query) -> Result<()> {
    match query {
        Query::Threshold { upper, lower } => {
            if upper.len() != game.players() || lower.len() != game.players() {
                return Err(Error::BadQuery(format!(
                    "threshold must list one bound per player ({} players, got {} upper / {} lower)",
                    game.players(),
                    upper.len(),
                    lower.len()
                )));
            }
        }
        Query::Welfare { visitors, .. } => {
            if *visitors > game.players() {
                return Err(Error::BadQuery(format!(
                    "welfare asks for {} visitors but the game has only {} players",
                    visitors,
                    game.players()
                )));
            }
        }
        Query::Pareto => {}
    }
    Ok(())
}

/// Parameters of one candidate sweep.
struct SweepCfg<'a> {
    labeling: &'a Labeling,
    /// Maximal canonical lasso length.
    bound: usize,
    /// Restrict walks to the shape of normalized plays (at most one
    /// repeated (vertex, visited) pair, rooted at the last first-visit).
    normalized: bool,
    /// Drop prefixes that already overstep a labeling deadline
    /// (quantitative games only; never used when inconsistent plays are
    /// themselves of interest).
    deadline_prune: bool,
    /// Drop prefixes whose locked-in costs already violate these upper
    /// thresholds.
    upper: Option<&'a [Option<Bound>]>,
}

/// Should the walk `seq` (a play prefix from the initial vertex) be
/// abandoned? Sound for every sweep: no consistent candidate the sweep is
/// responsible for is lost.
fn prune_walk(game: &Game, cfg: &SweepCfg, seq: &[VertexId]) -> bool {
    let players = game.players();
    let quant = game.mode == Mode::Quantitative;
    let deadline = cfg.deadline_prune && quant;
    let mut visited = PlayerSet::EMPTY;
    let mut first_visit: Vec<Option<usize>> = vec![None; players];
    let mut pending: Vec<Option<u64>> = vec![None; players];
    let mut seen: HashMap<(VertexId, u64), usize> = HashMap::new();
    let mut pair_used = false;
    let mut last_growth: Option<usize> = None;
    for (t, &v) in seq.iter().enumerate() {
        if deadline && t > 0 {
            for slot in pending.iter_mut() {
                if let Some(r) = slot {
                    if *r == 0 {
                        return true;
                    }
                    *r -= 1;
                }
            }
        }
        let tv = game.arena.targets_at(v);
        for p in tv.iter() {
            pending[p] = None;
            if first_visit[p].is_none() {
                first_visit[p] = Some(t);
            }
        }
        let grown = visited.union(tv);
        if grown != visited {
            // A normalized play never gains a new visit after its one
            // allowed repeat.
            if cfg.normalized && pair_used {
                return true;
            }
            last_growth = Some(t);
            visited = grown;
        }
        if deadline {
            if pending.iter().any(|r| *r == Some(0)) {
                return true;
            }
            let owner = game.arena.owner(v);
            if !visited.contains(owner) {
                if let Ok(Cost::Finite(b)) = cfg.labeling.get(game, v) {
                    if b == 0 {
                        return true;
                    }
                    let r = pending[owner].map_or(b, |cur| cur.min(b));
                    pending[owner] = Some(r);
                }
            }
        }
        if cfg.normalized {
            match seen.entry((v, visited.0)) {
                Entry::Occupied(slot) => {
                    let t0 = *slot.get();
                    if pair_used || last_growth != Some(t0) {
                        return true;
                    }
                    pair_used = true;
                }
                Entry::Vacant(slot) => {
                    slot.insert(t);
                }
            }
        }
    }
    if let Some(upper) = cfg.upper {
        for i in 0..players {
            if let Some(b) = upper[i] {
                // The best value player i can still end up with given this
                // prefix; monotone, so a failing best is final.
                let best = match game.mode {
                    Mode::Quantitative => match first_visit[i] {
                        Some(t) => Cost::Finite(t as u64),
                        None => Cost::Finite(seq.len() as u64),
                    },
                    Mode::Qualitative => {
                        Cost::Finite(if first_visit[i].is_some() { 1 } else { 0 })
                    }
                };
                if !b.admits_upper(best) {
                    return true;
                }
            }
        }
    }
    false
}

fn sweep_branch(
    game: &Game,
    cfg: &SweepCfg,
    first_edge: Option<VertexId>,
    f: &mut impl FnMut(&Lasso, bool),
) -> Result<()> {
    // One budget covers both walk extensions and reported plays, so the
    // consistency checks and the caller's bookkeeping stay bounded
    // alongside the walk tree itself.
    let steps = std::cell::Cell::new(0usize);
    let spend = || {
        steps.set(steps.get() + 1);
        steps.get() > SWEEP_CAP
    };
    let overflow = std::cell::Cell::new(false);
    search_lassoes_pruned(
        game,
        game.init,
        cfg.bound,
        |seq| {
            if spend() {
                overflow.set(true);
                return true;
            }
            if let Some(b) = first_edge {
                if seq.len() >= 2 && seq[1] != b {
                    return true;
                }
            }
            prune_walk(game, cfg, seq)
        },
        |lasso| {
            if spend() {
                overflow.set(true);
                return Search::Done(());
            }
            let consistent = lambda_consistent(game, cfg.labeling, lasso)
                .map(|c| c.consistent)
                .expect("enumerated plays are checkable");
            f(lasso, consistent);
            Search::Continue
        },
    );
    if overflow.get() {
        return Err(Error::SizeCap(SWEEP_CAP));
    }
    Ok(())
}

/// Feeds every candidate play (with its consistency flag) to `f`, in a
/// deterministic order that does not depend on `jobs`. With `jobs > 1` the
/// walk space is partitioned by the first edge and swept in parallel; the
/// branches are then replayed in successor order.
fn for_each_candidate(
    game: &Game,
    cfg: &SweepCfg,
    jobs: usize,
    mut f: impl FnMut(&Lasso, bool),
) -> Result<()> {
    let branches = game.arena.succ(game.init);
    if jobs <= 1 || branches.len() <= 1 {
        return sweep_branch(game, cfg, None, &mut f);
    }
    let collected: Result<Vec<Vec<(Lasso, bool)>>> = branches
        .par_iter()
        .map(|&b| {
            let mut out = Vec::new();
            sweep_branch(game, cfg, Some(b), &mut |l: &Lasso, c: bool| {
                out.push((l.clone(), c));
            })?;
            Ok(out)
        })
        .collect();
    for branch in collected? {
        for (lasso, consistent) in branch {
            f(&lasso, consistent);
        }
    }
    Ok(())
}

fn lex_before(game: &Game, a: &Lasso, b: &Lasso) -> bool {
    a.order_key(game) < b.order_key(game)
}

/// Decides `query` over the plays from the initial vertex that are
/// consistent with `labeling`. This is the engine shared by the equilibrium
/// deciders; it differs between them only in the labeling and the game —
/// subgame-perfect decisions run it on the extended game, whose canonical
/// plays are still covered by the *base* game's length bound, passed in as
/// `base_bound`. Witness machines are not attached here.
pub(crate) fn solve_query(
    game: &Game,
    labeling: &Labeling,
    query: &Query,
    base_bound: usize,
    jobs: usize,
) -> Result<Verdict> {
    validate_query(game, query)?;
    let quant = game.mode == Mode::Quantitative;
    match query {
        Query::Threshold { upper, lower } => {
            let has_lower = lower.iter().any(|b| b.is_some());
            let mut bound = base_bound;
            let mut normalized = true;
            if has_lower && quant {
                // Lower bounds may only be reachable by dawdling, which
                // normalization would remove; sweep the raw play space with
                // a horizon covering the largest finite bound.
                normalized = false;
                let maxfin = upper
                    .iter()
                    .chain(lower.iter())
                    .flatten()
                    .filter_map(|b| b.value.finite())
                    .max()
                    .unwrap_or(0);
                bound = bound.max(maxfin as usize + game.n_vertices() + 1);
            }
            let cfg = SweepCfg {
                labeling,
                bound,
                normalized,
                deadline_prune: true,
                upper: Some(upper),
            };
            let mut best: Option<(Lasso, Profile)> = None;
            for_each_candidate(game, &cfg, jobs, |lasso, consistent| {
                if !consistent {
                    return;
                }
                let profile = cost_or_gain_profile(game, lasso);
                if !meets_threshold(game.mode, &profile, upper, lower) {
                    return;
                }
                let better = match &best {
                    None => true,
                    Some((b, _)) => lex_before(game, lasso, b),
                };
                if better {
                    best = Some((lasso.clone(), profile));
                }
            })?;
            Ok(match best {
                Some((lasso, profile)) => Verdict {
                    yes: true,
                    welfare: Some(social_welfare(game, &lasso)),
                    lasso: Some(lasso),
                    profile: Some(profile),
                    ..Verdict::no()
                },
                None => Verdict::no(),
            })
        }
        Query::Welfare { visitors, total } => {
            let cfg = SweepCfg {
                labeling,
                bound: base_bound,
                normalized: true,
                deadline_prune: true,
                upper: None,
            };
            let mut best: Option<(Welfare, Lasso, Profile)> = None;
            for_each_candidate(game, &cfg, jobs, |lasso, consistent| {
                if !consistent {
                    return;
                }
                let w = social_welfare(game, lasso);
                let better = match &best {
                    None => true,
                    Some((bw, bl, _)) => w > *bw || (w == *bw && lex_before(game, lasso, bl)),
                };
                if better {
                    best = Some((w, lasso.clone(), cost_or_gain_profile(game, lasso)));
                }
            })?;
            Ok(match best {
                Some((w, lasso, profile)) if welfare_at_least(w, *visitors, *total) => Verdict {
                    yes: true,
                    lasso: Some(lasso),
                    profile: Some(profile),
                    welfare: Some(w),
                    ..Verdict::no()
                },
                Some((w, _, _)) => Verdict {
                    welfare: Some(w),
                    ..Verdict::no()
                },
                None => Verdict::no(),
            })
        }
        Query::Pareto => {
            // The front ranges over all plays, so inconsistent candidates
            // matter here and deadline pruning must stay off.
            let cfg = SweepCfg {
                labeling,
                bound: base_bound,
                normalized: true,
                deadline_prune: false,
                upper: None,
            };
            let mut table: HashMap<Profile, Option<Lasso>> = HashMap::new();
            for_each_candidate(game, &cfg, jobs, |lasso, consistent| {
                let profile = cost_or_gain_profile(game, lasso);
                let slot = table.entry(profile).or_insert(None);
                if consistent {
                    let better = match slot {
                        None => true,
                        Some(cur) => lex_before(game, lasso, cur),
                    };
                    if better {
                        *slot = Some(lasso.clone());
                    }
                }
            })?;
            let mut front: Vec<Profile> = table
                .keys()
                .filter(|p| !table.keys().any(|q| q.dominates(p, game.mode)))
                .cloned()
                .collect();
            front.sort_by(|a, b| a.0.cmp(&b.0));
            let mut best: Option<(Lasso, Profile)> = None;
            for p in &front {
                if let Some(Some(lasso)) = table.get(p) {
                    let better = match &best {
                        None => true,
                        Some((b, _)) => lex_before(game, lasso, b),
                    };
                    if better {
                        best = Some((lasso.clone(), p.clone()));
                    }
                }
            }
            Ok(match best {
                Some((lasso, profile)) => Verdict {
                    yes: true,
                    welfare: Some(social_welfare(game, &lasso)),
                    lasso: Some(lasso),
                    profile: Some(profile),
                    front: Some(front),
                    ..Verdict::no()
                },
                None => Verdict {
                    front: Some(front),
                    ..Verdict::no()
                },
            })
        }
    }
}

/// Consistency of a play (anchored at the initial vertex) against the
/// coalitional value labeling — the exact membership test for equilibrium
/// outcomes, with the first violated position on failure.
pub fn ne_consistency(game: &Game, lasso: &Lasso) -> Result<Consistency> {
    lasso.validate(game)?;
    if lasso.first_vertex() != game.init {
        return Err(Error::NotFromInit {
            found: game.arena.name(lasso.first_vertex()).to_string(),
            init: game.arena.name(game.init).to_string(),
        });
    }
    let labeling = val_labeling(game)?;
    lambda_consistent(game, &labeling, lasso)
}

/// Is the play the outcome of some equilibrium profile?
pub fn is_ne_outcome(game: &Game, lasso: &Lasso) -> Result<bool> {
    Ok(ne_consistency(game, lasso)?.consistent)
}

/// Builds one strategy machine per player whose composition replays `lasso`
/// and punishes the first player to leave it. Fails with
/// [`Error::NotEquilibriumOutcome`] when the play is not an equilibrium
/// outcome (the machines would not survive verification otherwise).
///
/// Machine shape, for a witness of length `n + 1` (positions `0..=n`,
/// cycle starting at position `k`): replay states `e0..=e{n+1}` — state
/// `e{t}` expects the vertex of position `t`, and `e{n+1}` expects the
/// cycle head again after one full traversal — plus one punishment state
/// `p{j}` per player `j`. A mismatch while expecting position `t` blames
/// the owner of position `t - 1` (the player who chose the edge) and locks
/// every machine into `p{owner}` forever: the deviator's own machine plays
/// their value-optimal strategy, everyone else plays the coalition's
/// value-optimal delay strategy against them.
pub fn synthesize_ne_machines(game: &Game, lasso: &Lasso) -> Result<MachineProfile> {
    let consistency = ne_consistency(game, lasso)?;
    if let Some(v) = consistency.violation {
        return Err(Error::NotEquilibriumOutcome {
            position: v.position,
            vertex: game.arena.name(v.vertex).to_string(),
            player: v.player + 1,
            residual: v.residual.to_string(),
            bound: v.bound.to_string(),
        });
    }
    replay_machines(game, lasso)
}

/// The replay-and-punish profile for an arbitrary play from the initial
/// vertex, without the equilibrium-outcome gate of
/// [`synthesize_ne_machines`]. The composition always replays `lasso`; the
/// profile passes [`crate::machine::verify_ne`] exactly when the play is an
/// equilibrium outcome.
pub fn replay_machines(game: &Game, lasso: &Lasso) -> Result<MachineProfile> {
    lasso.validate(game)?;
    if lasso.first_vertex() != game.init {
        return Err(Error::NotFromInit {
            found: game.arena.name(lasso.first_vertex()).to_string(),
            init: game.arena.name(game.init).to_string(),
        });
    }
    let players = game.players();
    let n_vertices = game.n_vertices();
    let n = lasso.len() - 1;
    let k = lasso.prefix.len();
    let word: Vec<VertexId> = lasso.window(lasso.len());
    let coas: Vec<Coalitional> = (0..players).map(|j| coalitional(game, j)).collect();

    let expected = |t: usize| -> VertexId {
        if t <= n {
            word[t]
        } else {
            word[k]
        }
    };
    // Play position represented by replay state t (for the next move).
    let position_of = |t: usize| -> usize { if t <= n { t } else { k } };
    let next_replay = |t: usize| -> usize {
        if t < n {
            t + 1
        } else if t == n {
            n + 1
        } else {
            k + 1
        }
    };
    let blame = |t: usize, current: VertexId| -> Player {
        if t == 0 {
            // Unreachable from the initial vertex (state e0 always sees the
            // first position); blame the current owner to stay total.
            game.arena.owner(current)
        } else {
            game.arena.owner(expected(t - 1))
        }
    };
    let punish_move = |machine_of: Player, deviator: Player, v: VertexId| -> VertexId {
        if machine_of == deviator {
            coas[deviator].min_choice[v].expect("own vertices carry a value-optimal choice")
        } else {
            coas[deviator].max_choice[v].expect("coalition vertices carry a delay choice")
        }
    };

    let n_states = n + 2 + players;
    let punish_state = |j: Player| -> usize { n + 2 + j };
    let mut machines = Vec::with_capacity(players);
    for p in 0..players {
        let mut state_names: Vec<String> = (0..=n + 1).map(|t| format!("e{t}")).collect();
        state_names.extend((1..=players).map(|j| format!("p{j}")));
        let mut update = vec![vec![0usize; n_vertices]; n_states];
        let mut moves = vec![vec![None; n_vertices]; n_states];
        for s in 0..n_states {
            for v in 0..n_vertices {
                let mine = game.arena.owner(v) == p;
                if s <= n + 1 {
                    if v == expected(s) {
                        update[s][v] = next_replay(s);
                        if mine {
                            moves[s][v] = Some(lasso.vertex_at(position_of(s) + 1));
                        }
                    } else {
                        let j = blame(s, v);
                        update[s][v] = punish_state(j);
                        if mine {
                            moves[s][v] = Some(punish_move(p, j, v));
                        }
                    }
                } else {
                    let j = s - (n + 2);
                    update[s][v] = s;
                    if mine {
                        moves[s][v] = Some(punish_move(p, j, v));
                    }
                }
            }
        }
        machines.push(StrategyMachine {
            player: p,
            state_names,
            initial: 0,
            update,
            moves,
        });
    }
    Ok(machines)
}

/// Decides `query` over equilibrium outcomes of `game`. Yes verdicts carry
/// a witness play and verified-shape strategy machines realizing it.
pub fn decide_ne(game: &Game, query: &Query, jobs: usize) -> Result<Verdict> {
    let labeling = val_labeling(game)?;
    let mut verdict = solve_query(game, &labeling, query, game.lasso_bound(), jobs)?;
    if let Some(lasso) = &verdict.lasso {
        verdict.machines = Some(synthesize_ne_machines(game, lasso)?);
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_game, parse_lasso};
    use crate::machine::{best_response_cost, composed_outcome, verify_ne};

    const EX: &str = "\
game quantitative
players 2
vertex v0 owner=2
vertex v1 owner=1 targets=2
vertex v2 owner=1
vertex v3 owner=1 targets=1
vertex v4 owner=1 targets=1,2
edge v0 v1 len=3
edge v0 v2
edge v2 v3
edge v2 v4 len=2
edge v3 v0
edge v4 v0
edge v1 v0
init v0
";

    fn ex_game() -> Game {
        parse_game(EX).expect("fixture parses")
    }

    fn lasso(game: &Game, text: &str) -> Lasso {
        parse_lasso(game, text).expect("lasso parses")
    }

    #[test]
    fn short_profile_is_not_an_outcome() {
        let g = ex_game();
        let l = lasso(&g, "| v0 v2 v2_v4_1 v4");
        assert!(!is_ne_outcome(&g, &l).unwrap());
        let c = ne_consistency(&g, &l).unwrap();
        let v = c.violation.expect("violation reported");
        assert_eq!(g.arena.name(v.vertex), "v2");
        assert_eq!(v.position, 1);
        assert_eq!(v.residual, Cost::Finite(2));
        assert_eq!(v.bound, Cost::Finite(1));
    }

    #[test]
    fn detour_outcome_is_an_equilibrium() {
        let g = ex_game();
        let l = lasso(&g, "v0 v0_v1_1 v0_v1_2 v1 | v0 v2 v3");
        assert!(is_ne_outcome(&g, &l).unwrap());
        assert_eq!(
            cost_or_gain_profile(&g, &l),
            Profile(vec![Cost::Finite(6), Cost::Finite(3)])
        );
    }

    #[test]
    fn synthesis_refuses_non_outcomes() {
        let g = ex_game();
        let l = lasso(&g, "| v0 v2 v2_v4_1 v4");
        match synthesize_ne_machines(&g, &l) {
            Err(Error::NotEquilibriumOutcome {
                position, vertex, ..
            }) => {
                assert_eq!(position, 1);
                assert_eq!(vertex, "v2");
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn synthesized_machines_replay_and_verify() {
        let g = ex_game();
        let l = lasso(&g, "v0 v0_v1_1 v0_v1_2 v1 | v0 v2 v3");
        let machines = synthesize_ne_machines(&g, &l).unwrap();
        // One state per traversal position, a wrap state, one punishment
        // state per player.
        for m in &machines {
            assert_eq!(m.n_states(), (l.len() - 1) + 2 + g.players());
        }
        let outcome = composed_outcome(&g, &machines).unwrap();
        assert_eq!(outcome.canonicalize(), l.canonicalize());
        assert!(verify_ne(&g, &machines).unwrap());
        // The punishment keeps both players at their outcome costs.
        assert_eq!(
            best_response_cost(&g, &machines, 0).unwrap(),
            Cost::Finite(6)
        );
        assert_eq!(
            best_response_cost(&g, &machines, 1).unwrap(),
            Cost::Finite(3)
        );
    }

    #[test]
    fn threshold_decisions_match_the_two_profiles() {
        let g = ex_game();
        let no = decide_ne(
            &g,
            &Query::Threshold {
                upper: vec![
                    Some(Bound::new(Cost::Finite(3))),
                    Some(Bound::new(Cost::Finite(3))),
                ],
                lower: vec![None, None],
            },
            1,
        )
        .unwrap();
        assert!(!no.yes);
        assert!(no.lasso.is_none() && no.machines.is_none());

        let yes = decide_ne(
            &g,
            &Query::Threshold {
                upper: vec![
                    Some(Bound::new(Cost::Finite(6))),
                    Some(Bound::new(Cost::Finite(3))),
                ],
                lower: vec![None, None],
            },
            1,
        )
        .unwrap();
        assert!(yes.yes);
        assert_eq!(
            yes.profile,
            Some(Profile(vec![Cost::Finite(6), Cost::Finite(3)]))
        );
        let machines = yes.machines.expect("witness machines attached");
        assert!(verify_ne(&g, &machines).unwrap());
    }

    #[test]
    fn parallel_sweeps_agree_with_sequential() {
        let g = ex_game();
        for query in [
            Query::Threshold {
                upper: vec![
                    Some(Bound::new(Cost::Finite(6))),
                    Some(Bound::new(Cost::Finite(3))),
                ],
                lower: vec![None, None],
            },
            Query::Welfare {
                visitors: 2,
                total: Cost::Finite(9),
            },
            Query::Pareto,
        ] {
            let a = decide_ne(&g, &query, 1).unwrap();
            let b = decide_ne(&g, &query, 4).unwrap();
            assert_eq!(a.yes, b.yes);
            assert_eq!(a.lasso, b.lasso);
            assert_eq!(a.front, b.front);
        }
    }

    #[test]
    fn best_welfare_is_two_visitors_total_nine() {
        let g = ex_game();
        let v = decide_ne(
            &g,
            &Query::Welfare {
                visitors: 2,
                total: Cost::Finite(9),
            },
            1,
        )
        .unwrap();
        assert!(v.yes);
        assert_eq!(
            v.welfare,
            Some(Welfare {
                visitors: 2,
                total: 9
            })
        );
        let tighter = decide_ne(
            &g,
            &Query::Welfare {
                visitors: 2,
                total: Cost::Finite(8),
            },
            1,
        )
        .unwrap();
        assert!(!tighter.yes);
        assert_eq!(
            tighter.welfare,
            Some(Welfare {
                visitors: 2,
                total: 9
            })
        );
    }

    #[test]
    fn pareto_front_is_unreachable_by_outcomes() {
        let g = ex_game();
        let v = decide_ne(&g, &Query::Pareto, 1).unwrap();
        assert!(!v.yes);
        let front = v.front.expect("front reported");
        assert_eq!(
            front,
            vec![
                Profile(vec![Cost::Finite(2), Cost::Finite(6)]),
                Profile(vec![Cost::Finite(3), Cost::Finite(3)]),
            ]
        );
    }

    #[test]
    fn lower_bounds_filter_outcomes() {
        let g = ex_game();
        // Some equilibrium costs player 1 at least 4: the (6,3) detour.
        let v = decide_ne(
            &g,
            &Query::Threshold {
                upper: vec![None, None],
                lower: vec![Some(Bound::new(Cost::Finite(4))), None],
            },
            1,
        )
        .unwrap();
        assert!(v.yes);
        // But nothing costs player 2 more than 3.
        let none = decide_ne(
            &g,
            &Query::Threshold {
                upper: vec![None, None],
                lower: vec![None, Some(Bound::strict(Cost::Finite(3)))],
            },
            1,
        )
        .unwrap();
        assert!(!none.yes);
    }

    #[test]
    fn trivial_threshold_is_always_satisfiable() {
        let g = ex_game();
        let v = decide_ne(
            &g,
            &Query::Threshold {
                upper: vec![Some(Bound::new(Cost::Infinite)); 2],
                lower: vec![None, None],
            },
            1,
        )
        .unwrap();
        assert!(v.yes);
        let machines = v.machines.unwrap();
        assert!(verify_ne(&g, &machines).unwrap());
    }

    #[test]
    fn queries_validate_their_shape() {
        let g = ex_game();
        assert!(matches!(
            decide_ne(
                &g,
                &Query::Threshold {
                    upper: vec![None],
                    lower: vec![None],
                },
                1,
            ),
            Err(Error::BadQuery(_))
        ));
        assert!(matches!(
            decide_ne(
                &g,
                &Query::Welfare {
                    visitors: 3,
                    total: Cost::Infinite,
                },
                1,
            ),
            Err(Error::BadQuery(_))
        ));
    }
}
