//! Worst-case residuals over consistent plays.
//!
//! Given a labeling, the consistent plays from a vertex are the credible
//! continuations of the subgame-perfect characterization. This module
//! computes, for a vertex and a player, the *largest* residual cost the
//! player can be made to suffer across those plays, and can extract a play
//! attaining it. It is used on visit-tracking extensions
//! ([`crate::extended`]), whose target memberships are constant along
//! cycles; the qualitative analysis relies on that shape.
//!
//! Quantitative games: a product state pairs a vertex with the tightest
//! outstanding deadline per player (the minimum of all bounds imposed so
//! far, minus the steps elapsed). Arriving at a vertex decrements the
//! deadlines, clears the players served there, rejects the arrival if a
//! deadline expired unserved, and imposes the owner's label as a new
//! deadline when the owner is unserved. Keeping only the tightest deadline
//! is exact, and the product stays sparse: along any legal cycle no deadline
//! is outstanding (an outstanding one would strictly decrease per lap).
//! Consistent plays are exactly the infinite paths of the product, so:
//!
//! * the *viable* states (greatest set where every member keeps a successor
//!   in the set) are those admitting any consistent play;
//! * the player can be denied forever iff the start lies in the greatest
//!   viable subset that stays clear of their target;
//! * otherwise the region of viable, unserved states reachable from the
//!   start is acyclic, and the worst residual is its longest path into a
//!   viable serving state.
//!
//! Qualitative games track the set of players *owed* an eventual visit. A
//! lasso play is consistent exactly when the owed set is empty along its
//! cycle (targets are cycle-constant, so nobody owed there is ever served).

use std::collections::HashMap;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::format::Labeling;
use crate::game::{Game, Lasso, Mode, Player, PlayerSet, VertexId};

/// Hard cap on materialized product states.
pub(crate) const PRODUCT_CAP: usize = 200_000;

/// Largest residual cost `player` suffers over the plays from `from` that
/// are consistent with `lab`.
pub(crate) fn max_resid(game: &Game, lab: &Labeling, from: VertexId, player: Player) -> Result<Cost> {
    if game.arena.is_target(from, player) {
        return Ok(Cost::ZERO);
    }
    match game.mode {
        Mode::Quantitative => {
            let p = QuantProduct::build(game, lab, from)?;
            p.max_residual(player)
        }
        Mode::Qualitative => {
            let p = QualProduct::build(game, lab, from)?;
            p.max_residual(player)
        }
    }
}

/// A consistent play from `from` attaining [`max_resid`] for `player`
/// (any consistent play when the player is already served at `from`).
pub(crate) fn resid_witness(
    game: &Game,
    lab: &Labeling,
    from: VertexId,
    player: Player,
) -> Result<Lasso> {
    match game.mode {
        Mode::Quantitative => {
            let p = QuantProduct::build(game, lab, from)?;
            p.witness(player)
        }
        Mode::Qualitative => {
            let p = QualProduct::build(game, lab, from)?;
            p.witness(player)
        }
    }
}

fn label_at(game: &Game, lab: &Labeling, v: VertexId) -> Cost {
    lab.get(game, v).expect("labeling is total")
}

/// Closes a product-state path (whose last entry repeats an earlier one)
/// into the lasso play it spells, reading vertices through `vertex_of`.
fn close_path(path: &[usize], repeat_at: usize, vertex_of: impl Fn(usize) -> VertexId) -> Lasso {
    let last = path.len() - 1;
    let prefix = path[..repeat_at].iter().map(|&s| vertex_of(s)).collect();
    let cycle = path[repeat_at..last].iter().map(|&s| vertex_of(s)).collect();
    Lasso::new(prefix, cycle)
}

/// Greedy deterministic continuation: starting from the last state of
/// `path`, repeatedly move to the first allowed successor, preferring any
/// successor that closes a cycle with the existing path; returns the closed
/// lasso.
fn greedy_close(
    path: &mut Vec<usize>,
    succ: impl Fn(usize) -> Vec<usize>,
    vertex_of: impl Fn(usize) -> VertexId,
) -> Lasso {
    let mut positions: HashMap<usize, usize> = path
        .iter()
        .enumerate()
        .map(|(t, &s)| (s, t))
        .collect();
    loop {
        let cur = *path.last().unwrap();
        let options = succ(cur);
        debug_assert!(!options.is_empty(), "allowed region must be successor-closed");
        let closing = options
            .iter()
            .filter(|s| positions.contains_key(s))
            .min_by_key(|s| positions[s]);
        match closing {
            Some(&s) => {
                let at = positions[&s];
                path.push(s);
                return close_path(path, at, vertex_of);
            }
            None => {
                let s = options[0];
                positions.insert(s, path.len());
                path.push(s);
            }
        }
    }
}

/// Greatest subset of `allowed` whose members all keep a successor inside
/// the subset.
fn successor_closed_core(n: usize, allowed: &[bool], succ: &[Vec<usize>]) -> Vec<bool> {
    let mut core = allowed.to_vec();
    loop {
        let mut changed = false;
        for s in 0..n {
            if core[s] && !succ[s].iter().any(|&w| core[w]) {
                core[s] = false;
                changed = true;
            }
        }
        if !changed {
            return core;
        }
    }
}

// ---------------------------------------------------------------------------
// Quantitative: deadline product.
// ---------------------------------------------------------------------------

type Deadlines = Vec<Option<u64>>;

struct QuantProduct<'a> {
    game: &'a Game,
    states: Vec<(VertexId, Deadlines)>,
    succ: Vec<Vec<usize>>,
    viable: Vec<bool>,
    start: usize,
}

/// Deadline vector after arriving at `x`, given the outgoing vector of the
/// previous state (`None` for the start of the play); `None` result means
/// the arrival violates a deadline and is not part of any consistent play.
fn arrive_quant(
    game: &Game,
    lab: &Labeling,
    prev: Option<&Deadlines>,
    x: VertexId,
) -> Option<Deadlines> {
    let mut d: Deadlines = match prev {
        Some(p) => {
            let mut d = p.clone();
            for slot in d.iter_mut() {
                if let Some(r) = slot {
                    if *r == 0 {
                        return None;
                    }
                    *r -= 1;
                }
            }
            d
        }
        None => vec![None; game.players()],
    };
    let served = game.arena.targets_at(x);
    for j in served.iter() {
        d[j] = None;
    }
    if d.iter().any(|slot| *slot == Some(0)) {
        return None;
    }
    let owner = game.arena.owner(x);
    if !served.contains(owner) {
        if let Cost::Finite(b) = label_at(game, lab, x) {
            let r = d[owner].map_or(b, |cur| cur.min(b));
            if r == 0 {
                return None;
            }
            d[owner] = Some(r);
        }
    }
    Some(d)
}

impl<'a> QuantProduct<'a> {
    fn build(game: &'a Game, lab: &Labeling, from: VertexId) -> Result<QuantProduct<'a>> {
        let d0 = arrive_quant(game, lab, None, from)
            .ok_or_else(|| Error::NoConsistentPlay(game.arena.name(from).to_string()))?;
        let mut states: Vec<(VertexId, Deadlines)> = vec![(from, d0)];
        let mut index: HashMap<(VertexId, Deadlines), usize> = HashMap::new();
        index.insert(states[0].clone(), 0);
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut head = 0;
        while head < states.len() {
            let (x, d) = states[head].clone();
            head += 1;
            let mut out = Vec::new();
            for &y in game.arena.succ(x) {
                if let Some(d2) = arrive_quant(game, lab, Some(&d), y) {
                    let key = (y, d2);
                    let id = match index.get(&key) {
                        Some(&id) => id,
                        None => {
                            let id = states.len();
                            if id >= PRODUCT_CAP {
                                return Err(Error::SizeCap(PRODUCT_CAP));
                            }
                            index.insert(key.clone(), id);
                            states.push(key);
                            id
                        }
                    };
                    out.push(id);
                }
            }
            succ.push(out);
        }
        let n = states.len();
        let viable = successor_closed_core(n, &vec![true; n], &succ);
        if !viable[0] {
            return Err(Error::NoConsistentPlay(game.arena.name(from).to_string()));
        }
        Ok(QuantProduct {
            game,
            states,
            succ,
            viable,
            start: 0,
        })
    }

    fn serves(&self, s: usize, player: Player) -> bool {
        self.game.arena.is_target(self.states[s].0, player)
    }

    /// Greatest viable region avoiding the player's target forever.
    fn denial_region(&self, player: Player) -> Vec<bool> {
        let n = self.states.len();
        let allowed: Vec<bool> = (0..n)
            .map(|s| self.viable[s] && !self.serves(s, player))
            .collect();
        successor_closed_core(n, &allowed, &self.succ)
    }

    /// Longest-path table over the acyclic region of viable, unserved
    /// states reachable from the start: `f[s]` is the worst residual of
    /// `player` from `s`. Returns `None` for states outside the region.
    fn residual_table(&self, player: Player) -> Vec<Option<u64>> {
        let n = self.states.len();
        let in_region: Vec<bool> = (0..n)
            .map(|s| self.viable[s] && !self.serves(s, player))
            .collect();
        // Restrict to the part reachable from the start within the region.
        let mut reach = vec![false; n];
        if in_region[self.start] {
            reach[self.start] = true;
            let mut stack = vec![self.start];
            while let Some(s) = stack.pop() {
                for &w in &self.succ[s] {
                    if in_region[w] && !reach[w] {
                        reach[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        // Kahn ordering over the reachable region (it is acyclic whenever
        // the denial check failed, which callers establish first).
        let mut indeg = vec![0usize; n];
        for s in 0..n {
            if reach[s] {
                for &w in &self.succ[s] {
                    if reach[w] {
                        indeg[w] += 1;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).filter(|&s| reach[s] && indeg[s] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let s = order[head];
            head += 1;
            for &w in &self.succ[s] {
                if reach[w] {
                    indeg[w] -= 1;
                    if indeg[w] == 0 {
                        order.push(w);
                    }
                }
            }
        }
        assert_eq!(
            order.len(),
            reach.iter().filter(|&&r| r).count(),
            "unserved viable region must be acyclic once denial is ruled out"
        );
        let mut f: Vec<Option<u64>> = vec![None; n];
        for &s in order.iter().rev() {
            let mut best: Option<u64> = None;
            for &w in &self.succ[s] {
                let candidate = if self.serves(w, player) && self.viable[w] {
                    Some(1)
                } else {
                    f[w].map(|r| r + 1)
                };
                if let Some(c) = candidate {
                    best = Some(best.map_or(c, |b| b.max(c)));
                }
            }
            f[s] = Some(best.expect("viable states keep a viable successor"));
        }
        f
    }

    fn max_residual(&self, player: Player) -> Result<Cost> {
        if self.serves(self.start, player) {
            return Ok(Cost::ZERO);
        }
        if self.denial_region(player)[self.start] {
            return Ok(Cost::Infinite);
        }
        let f = self.residual_table(player);
        Ok(Cost::Finite(
            f[self.start].expect("start lies in its own reachable region"),
        ))
    }

    fn viable_succ(&self, s: usize) -> Vec<usize> {
        self.succ[s].iter().copied().filter(|&w| self.viable[w]).collect()
    }

    fn witness(&self, player: Player) -> Result<Lasso> {
        let vertex_of = |s: usize| self.states[s].0;
        if self.serves(self.start, player) {
            let mut path = vec![self.start];
            return Ok(greedy_close(&mut path, |s| self.viable_succ(s), vertex_of));
        }
        let denial = self.denial_region(player);
        if denial[self.start] {
            let allowed =
                |s: usize| -> Vec<usize> { self.succ[s].iter().copied().filter(|&w| denial[w]).collect() };
            let mut path = vec![self.start];
            return Ok(greedy_close(&mut path, allowed, vertex_of));
        }
        let f = self.residual_table(player);
        let mut path = vec![self.start];
        loop {
            let s = *path.last().unwrap();
            let want = f[s].expect("path stays in the scored region");
            if want == 1 {
                // Step into a viable serving state, then close greedily.
                let w = self.succ[s]
                    .iter()
                    .copied()
                    .find(|&w| self.serves(w, player) && self.viable[w])
                    .expect("residual 1 needs a viable serving successor");
                path.push(w);
                return Ok(greedy_close(&mut path, |s| self.viable_succ(s), vertex_of));
            }
            let w = self.succ[s]
                .iter()
                .copied()
                .find(|&w| f[w] == Some(want - 1))
                .expect("longest path continues through a maximizing successor");
            path.push(w);
        }
    }
}

// ---------------------------------------------------------------------------
// Qualitative: owed-set product.
// ---------------------------------------------------------------------------

struct QualProduct<'a> {
    game: &'a Game,
    states: Vec<(VertexId, PlayerSet)>,
    succ: Vec<Vec<usize>>,
    start: usize,
}

/// Owed set after arriving at `x`: everyone served here is paid off, and the
/// owner is newly owed when unserved with a finite label.
fn arrive_qual(game: &Game, lab: &Labeling, prev: PlayerSet, x: VertexId) -> PlayerSet {
    let served = game.arena.targets_at(x);
    let mut owed = prev.without(served);
    let owner = game.arena.owner(x);
    if !served.contains(owner) && label_at(game, lab, x).is_finite() {
        owed.insert(owner);
    }
    owed
}

impl<'a> QualProduct<'a> {
    fn build(game: &'a Game, lab: &Labeling, from: VertexId) -> Result<QualProduct<'a>> {
        let o0 = arrive_qual(game, lab, PlayerSet::EMPTY, from);
        let mut states: Vec<(VertexId, PlayerSet)> = vec![(from, o0)];
        let mut index: HashMap<(VertexId, PlayerSet), usize> = HashMap::new();
        index.insert(states[0], 0);
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut head = 0;
        while head < states.len() {
            let (x, owed) = states[head];
            head += 1;
            let mut out = Vec::new();
            for &y in game.arena.succ(x) {
                let key = (y, arrive_qual(game, lab, owed, y));
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = states.len();
                        if id >= PRODUCT_CAP {
                            return Err(Error::SizeCap(PRODUCT_CAP));
                        }
                        index.insert(key, id);
                        states.push(key);
                        id
                    }
                };
                out.push(id);
            }
            succ.push(out);
        }
        Ok(QualProduct {
            game,
            states,
            succ,
            start: 0,
        })
    }

    fn serves(&self, s: usize, player: Player) -> bool {
        self.game.arena.is_target(self.states[s].0, player)
    }

    /// States from which a consistent play can keep avoiding the player
    /// forever: inside the player-free region, the debt-free states with
    /// infinite debt-free paths, plus everything reaching them player-free.
    fn denial_reach(&self, player: Player) -> Vec<bool> {
        let n = self.states.len();
        let clear: Vec<bool> = (0..n)
            .map(|s| !self.serves(s, player) && self.states[s].1.is_empty())
            .collect();
        let clear_succ: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                if clear[s] {
                    self.succ[s].iter().copied().filter(|&w| clear[w]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        let core = successor_closed_core(n, &clear, &clear_succ);
        // Backward closure through the player-free region.
        let mut can = core;
        loop {
            let mut changed = false;
            for s in 0..n {
                if !can[s]
                    && !self.serves(s, player)
                    && self.succ[s].iter().any(|&w| can[w])
                {
                    can[s] = true;
                    changed = true;
                }
            }
            if !changed {
                return can;
            }
        }
    }

    fn max_residual(&self, player: Player) -> Result<Cost> {
        if self.serves(self.start, player) {
            return Ok(Cost::ZERO);
        }
        if self.denial_reach(player)[self.start] {
            return Ok(Cost::Infinite);
        }
        // Every consistent play serves the player; only finiteness matters
        // in qualitative games.
        Ok(Cost::Finite(1))
    }

    /// Deterministic path from the start through `region` into `core`, then
    /// closed greedily within `core`.
    fn reach_and_close(&self, region: &[bool], core: &[bool]) -> Option<Lasso> {
        let n = self.states.len();
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        if !region[self.start] {
            return None;
        }
        seen[self.start] = true;
        queue.push_back(self.start);
        let mut hit = if core[self.start] { Some(self.start) } else { None };
        while hit.is_none() {
            let s = queue.pop_front()?;
            for &w in &self.succ[s] {
                if region[w] && !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(s);
                    if core[w] {
                        hit = Some(w);
                        break;
                    }
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = hit?;
        while let Some(p) = parent[cur] {
            path.push(cur);
            cur = p;
        }
        path.push(self.start);
        path.reverse();
        let allowed = |s: usize| -> Vec<usize> {
            self.succ[s].iter().copied().filter(|&w| core[w]).collect()
        };
        Some(greedy_close(&mut path, allowed, |s| self.states[s].0))
    }

    fn witness(&self, player: Player) -> Result<Lasso> {
        let n = self.states.len();
        if !self.serves(self.start, player) {
            let denial = self.denial_reach(player);
            if denial[self.start] {
                let clear: Vec<bool> = (0..n)
                    .map(|s| !self.serves(s, player) && self.states[s].1.is_empty())
                    .collect();
                let clear_succ: Vec<Vec<usize>> = (0..n)
                    .map(|s| {
                        if clear[s] {
                            self.succ[s].iter().copied().filter(|&w| clear[w]).collect()
                        } else {
                            Vec::new()
                        }
                    })
                    .collect();
                let core = successor_closed_core(n, &clear, &clear_succ);
                let region: Vec<bool> = (0..n).map(|s| !self.serves(s, player)).collect();
                return self.reach_and_close(&region, &core).ok_or_else(|| {
                    Error::NoConsistentPlay(self.game.arena.name(self.states[self.start].0).to_string())
                });
            }
        }
        // Any consistent play: reach a debt-free cycle anywhere.
        let clear: Vec<bool> = (0..n).map(|s| self.states[s].1.is_empty()).collect();
        let clear_succ: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                if clear[s] {
                    self.succ[s].iter().copied().filter(|&w| clear[w]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        let core = successor_closed_core(n, &clear, &clear_succ);
        let region = vec![true; n];
        self.reach_and_close(&region, &core).ok_or_else(|| {
            Error::NoConsistentPlay(self.game.arena.name(self.states[self.start].0).to_string())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_game;

    /// A two-player quantitative chain where the labeling alone dictates how
    /// long player 1 can be stalled at the fork.
    #[test]
    fn deadline_bounds_the_worst_stall() {
        // Play can loop at wait or go to goal (target of player 1).
        let g = parse_game(
            "game quantitative\nplayers 2\n\
             vertex fork owner=1\nvertex wait owner=2\nvertex goal owner=2 targets=1\n\
             edge fork wait\nedge fork goal\nedge wait wait\nedge wait goal\nedge goal goal\n\
             init fork\n",
        )
        .unwrap();
        // Label fork with 3: it binds fork's owner, so any consistent play
        // serves player 1 within 3 steps of visiting fork.
        let mut values = vec![Cost::Infinite; g.n_vertices()];
        values[g.arena.vertex_id("fork").unwrap()] = Cost::Finite(3);
        let lab = Labeling::total(values);
        let fork = g.arena.vertex_id("fork").unwrap();
        assert_eq!(max_resid(&g, &lab, fork, 0).unwrap(), Cost::Finite(3));
        let w = resid_witness(&g, &lab, fork, 0).unwrap();
        assert_eq!(
            crate::lasso_ops::residual_cost(&g, &w, 0, 0),
            Cost::Finite(3)
        );
        // Player 2 is never served anywhere: denial is possible.
        assert_eq!(max_resid(&g, &lab, fork, 1).unwrap(), Cost::Infinite);
    }

    #[test]
    fn unlabeled_games_allow_unbounded_denial() {
        let g = parse_game(
            "game quantitative\nplayers 2\n\
             vertex fork owner=2\nvertex wait owner=2\nvertex goal owner=1 targets=1\n\
             edge fork wait\nedge fork goal\nedge wait wait\nedge wait goal\nedge goal goal\n\
             init fork\n",
        )
        .unwrap();
        let lab = Labeling::total(vec![Cost::Infinite; g.n_vertices()]);
        let fork = g.arena.vertex_id("fork").unwrap();
        assert_eq!(max_resid(&g, &lab, fork, 0).unwrap(), Cost::Infinite);
        let w = resid_witness(&g, &lab, fork, 0).unwrap();
        assert_eq!(
            crate::lasso_ops::residual_cost(&g, &w, 0, 0),
            Cost::Infinite
        );
    }

    #[test]
    fn served_start_has_zero_residual() {
        let g = parse_game(
            "game quantitative\nplayers 1\n\
             vertex a owner=1 targets=1\nedge a a\ninit a\n",
        )
        .unwrap();
        let lab = Labeling::total(vec![Cost::Infinite]);
        assert_eq!(max_resid(&g, &lab, 0, 0).unwrap(), Cost::ZERO);
        let w = resid_witness(&g, &lab, 0, 0).unwrap();
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn qualitative_commitments_force_service() {
        // start (owner 1, unserved) labeled finite: every consistent play
        // must eventually serve player 1; the only escape is via goal.
        let g = parse_game(
            "game qualitative\nplayers 2\n\
             vertex start owner=1\nvertex loop owner=2\nvertex goal owner=2 targets=1\n\
             edge start loop\nedge start goal\nedge loop loop\nedge loop goal\nedge goal goal\n\
             init start\n",
        )
        .unwrap();
        let start = g.arena.vertex_id("start").unwrap();
        let finite_at_start = {
            let mut values = vec![Cost::Infinite; g.n_vertices()];
            values[start] = Cost::Finite(1);
            Labeling::total(values)
        };
        assert_eq!(
            max_resid(&g, &finite_at_start, start, 0).unwrap(),
            Cost::Finite(1)
        );
        let w = resid_witness(&g, &finite_at_start, start, 0).unwrap();
        assert!(crate::lasso_ops::residual_cost(&g, &w, 0, 0).is_finite());

        let free = Labeling::total(vec![Cost::Infinite; g.n_vertices()]);
        assert_eq!(max_resid(&g, &free, start, 0).unwrap(), Cost::Infinite);
        let w = resid_witness(&g, &free, start, 0).unwrap();
        assert!(!crate::lasso_ops::residual_cost(&g, &w, 0, 0).is_finite());
    }
}
