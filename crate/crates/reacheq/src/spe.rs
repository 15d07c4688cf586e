//! Subgame-perfect equilibria.
//!
//! The pipeline: build the visit-tracking extension of the game
//! ([`crate::extended`]), compute the greatest labeling fixpoint
//! ([`lambda_star`]) whose consistent plays from the extended initial vertex
//! are exactly the subgame-perfect outcomes, then decide queries by the same
//! consistent-play sweep the Nash decider uses — only the game (extended)
//! and the labeling (the fixpoint) differ.
//!
//! Synthesis goes through an explicit deviation-witness family
//! ([`SpeWitness`]): one play for the intended outcome plus, for every
//! player `i` and every extended vertex `y` that `i` can move to, a
//! consistent continuation from `y` that is worst for `i`. The family is
//! *good* when no suffix of any stored play would rather deviate
//! ([`check_good`]); machines built from a good family replay the outcome
//! and, on every deviation, switch everyone to the punishing continuation —
//! re-entrant, so later deviations are punished the same way.
//! [`verify_spe`] independently checks any machine profile by exploring
//! every reachable configuration and comparing each not-yet-served player's
//! best response against the composed continuation.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::extended::{build_extended, lift_lasso, project_lasso, Extended};
use crate::format::Labeling;
use crate::game::{Game, Lasso, Mode, Player, PlayerSet, VertexId};
use crate::lasso_ops::{lambda_consistent, residual_cost, Consistency};
use crate::machine::{
    advance_config, best_response_from, composed_outcome_from, initial_config, validate_profile,
    Config, MachineProfile, StrategyMachine,
};
use crate::ne::{solve_query, Query, Verdict};
use crate::resid::{max_resid, resid_witness};

/// Hard cap on labeling-descent rounds before reporting divergence.
pub const FIXPOINT_ROUNDS_CAP: usize = 1_000;

/// Hard cap on configurations explored while verifying a machine profile.
pub const VERIFY_CAP: usize = 100_000;

/// A game's subgame-perfect analysis: the visit-tracking extension together
/// with the labeling fixpoint over its vertices.
pub struct Spe {
    pub ext: Extended,
    pub lambda: Labeling,
}

/// Builds the extension and runs the labeling fixpoint.
pub fn analyze(game: &Game) -> Result<Spe> {
    let ext = build_extended(game)?;
    let lambda = lambda_star(&ext)?;
    Ok(Spe { ext, lambda })
}

/// Greatest fixpoint of the labeling update on the extended game: at a
/// vertex whose owner `i` is still unserved, the label is one more than the
/// smallest — over the successors — worst residual cost `i` suffers across
/// the plays consistent with the current labeling; served-owner vertices
/// carry no constraint. Iteration descends from the all-infinite labeling
/// and stops when two consecutive rounds coincide.
///
/// Descending from the top keeps every intermediate labeling above the
/// fixpoint, so consistent plays never vanish mid-iteration, and the first
/// repeat is the greatest fixpoint itself.
pub fn lambda_star(ext: &Extended) -> Result<Labeling> {
    let g = &ext.game;
    let n = g.n_vertices();
    let mut cur = vec![Cost::Infinite; n];
    for _ in 0..FIXPOINT_ROUNDS_CAP {
        let lab = Labeling::total(cur.clone());
        // The worst residual depends only on (successor, owner); share it
        // across vertices within the round.
        let mut memo: HashMap<(VertexId, Player), Cost> = HashMap::new();
        let mut next = vec![Cost::Infinite; n];
        let mut changed = false;
        for x in 0..n {
            let i = g.arena.owner(x);
            if g.arena.is_target(x, i) {
                continue;
            }
            let mut best = Cost::Infinite;
            for &y in g.arena.succ(x) {
                let r = match memo.get(&(y, i)) {
                    Some(&r) => r,
                    None => {
                        let r = max_resid(g, &lab, y, i)?;
                        memo.insert((y, i), r);
                        r
                    }
                };
                if r < best {
                    best = r;
                }
            }
            next[x] = best.plus(1);
            if next[x] != cur[x] {
                changed = true;
            }
        }
        if !changed {
            return Ok(Labeling::total(cur));
        }
        cur = next;
    }
    Err(Error::FixpointDiverged(FIXPOINT_ROUNDS_CAP))
}

/// Checks a play of the *base* game against the subgame-perfect
/// characterization: its lift into the extension must be consistent with
/// the labeling fixpoint. Violations are reported in base-game coordinates.
pub fn spe_consistency(game: &Game, spe: &Spe, lasso: &Lasso) -> Result<Consistency> {
    let lifted = lift_lasso(&spe.ext, game, lasso)?;
    let mut c = lambda_consistent(&spe.ext.game, &spe.lambda, &lifted)?;
    if let Some(v) = &mut c.violation {
        v.vertex = spe.ext.base_vertex(v.vertex);
    }
    Ok(c)
}

/// Whether the play is the outcome of some subgame-perfect equilibrium.
pub fn is_spe_outcome(game: &Game, spe: &Spe, lasso: &Lasso) -> Result<bool> {
    Ok(spe_consistency(game, spe, lasso)?.consistent)
}

/// Decides a query over subgame-perfect outcomes and, on yes, attaches a
/// witness play (in base coordinates) with machines realizing it.
///
/// The sweep runs on the extended game but keeps the *base* game's length
/// bound: extension never lengthens a canonical play, because the served
/// set is determined by the base prefix.
pub fn decide_spe(game: &Game, query: &Query, jobs: usize) -> Result<Verdict> {
    let spe = analyze(game)?;
    let mut verdict = solve_query(&spe.ext.game, &spe.lambda, query, game.lasso_bound(), jobs)?;
    if let Some(ext_lasso) = verdict.lasso.take() {
        let base = project_lasso(&spe.ext, &ext_lasso);
        let witness = build_witness(game, &spe, &base)?;
        verdict.machines = Some(synthesize_spe_machines(game, &spe, &witness)?);
        verdict.lasso = Some(base);
    }
    Ok(verdict)
}

/// Deviation-witness family certifying a subgame-perfect outcome.
#[derive(Clone, Debug)]
pub struct SpeWitness {
    /// The intended outcome, as a play of the extended game.
    pub root: Lasso,
    /// For every potential deviator `i` and extended vertex `y` an `i`-owned
    /// vertex can move to, a consistent continuation from `y` that is worst
    /// for `i` — the credible threat met after deviating there.
    pub punish: BTreeMap<(Player, VertexId), Lasso>,
}

/// Builds the witness family for an accepted outcome: the lifted play plus
/// one worst-case consistent continuation per deviation edge of the
/// extended game. Refuses plays that fail the characterization.
pub fn build_witness(game: &Game, spe: &Spe, lasso: &Lasso) -> Result<SpeWitness> {
    let c = spe_consistency(game, spe, lasso)?;
    if let Some(v) = c.violation {
        return Err(Error::NotEquilibriumOutcome {
            position: v.position,
            vertex: game.arena.name(v.vertex).to_string(),
            player: v.player + 1,
            residual: v.residual.to_string(),
            bound: v.bound.to_string(),
        });
    }
    let root = lift_lasso(&spe.ext, game, lasso)?;
    let xg = &spe.ext.game;
    let mut punish = BTreeMap::new();
    for x in 0..xg.n_vertices() {
        let i = xg.arena.owner(x);
        for &y in xg.arena.succ(x) {
            if !punish.contains_key(&(i, y)) {
                punish.insert((i, y), resid_witness(xg, &spe.lambda, y, i)?);
            }
        }
    }
    Ok(SpeWitness { root, punish })
}

/// First goodness violation in the family, if any: a suffix of a stored
/// play, taken at a vertex whose owner is unserved, that would profit from
/// deviating — its residual exceeds one step plus the punishing
/// continuation's cost (quantitatively), or it never serves the owner while
/// some deviation would (qualitatively).
fn goodness_violation(spe: &Spe, witness: &SpeWitness) -> Option<String> {
    let xg = &spe.ext.game;
    let quant = xg.mode == Mode::Quantitative;
    let plays = std::iter::once((None, &witness.root))
        .chain(witness.punish.iter().map(|(k, l)| (Some(*k), l)));
    for (key, play) in plays {
        for t in 0..play.len() {
            let x = play.vertex_at(t);
            let i = xg.arena.owner(x);
            if xg.arena.is_target(x, i) {
                continue;
            }
            let r = residual_cost(xg, play, t, i);
            for &y in xg.arena.succ(x) {
                let c = residual_cost(xg, &witness.punish[&(i, y)], 0, i);
                let bad = if quant {
                    r > c.plus(1)
                } else {
                    !r.is_finite() && c.is_finite()
                };
                if bad {
                    let which = match key {
                        None => "the outcome play".to_string(),
                        Some((j, u)) => format!(
                            "the punishment play for player {} at {}",
                            j + 1,
                            xg.arena.name(u)
                        ),
                    };
                    return Some(format!(
                        "at position {t} of {which}, player {} faces residual {r} \
                         but deviating to {} costs only 1+{c}",
                        i + 1,
                        xg.arena.name(y)
                    ));
                }
            }
        }
    }
    None
}

/// Whether no suffix of any stored play profits from deviating.
pub fn check_good(spe: &Spe, witness: &SpeWitness) -> bool {
    goodness_violation(spe, witness).is_none()
}

/// Builds one machine per player from a good witness family.
///
/// All machines share the same state space: one state per position `t` of
/// each stored play `ι` (named `w{ι}.t{t}`), including a wrap state at
/// `t = len` so that after one full traversal the machine re-enters the
/// cycle knowing it arrived from the cycle's last vertex — the previous
/// position determines whom to blame for a deviation. On the expected
/// vertex the machine follows its play; on any other successor of the
/// previous vertex, the owner of that previous vertex is the deviator `j`,
/// the observed vertex is located in the extension, and every machine jumps
/// into the punishment play for `(j, landing)` — including deviations from
/// punishment plays themselves.
pub fn synthesize_spe_machines(
    game: &Game,
    spe: &Spe,
    witness: &SpeWitness,
) -> Result<MachineProfile> {
    if let Some(why) = goodness_violation(spe, witness) {
        return Err(Error::WitnessNotGood(why));
    }
    let ext = &spe.ext;
    let plays: Vec<&Lasso> = std::iter::once(&witness.root)
        .chain(witness.punish.values())
        .collect();
    let mut index: HashMap<(Player, VertexId), usize> = HashMap::new();
    for (k, key) in witness.punish.keys().enumerate() {
        index.insert(*key, k + 1);
    }
    let mut offsets = Vec::with_capacity(plays.len());
    let mut total = 0usize;
    for p in &plays {
        offsets.push(total);
        total += p.len() + 1;
    }
    let state_names: Vec<String> = plays
        .iter()
        .enumerate()
        .flat_map(|(pi, p)| (0..=p.len()).map(move |t| format!("w{pi}.t{t}")))
        .collect();
    let n = game.n_vertices();

    // The transition structure is identical for every player; machines
    // differ only in which vertices they answer for.
    let mut update = vec![vec![0usize; n]; total];
    let mut planned = vec![vec![0 as VertexId; n]; total];
    for (pi, play) in plays.iter().enumerate() {
        let len = play.len();
        for t in 0..=len {
            let s = offsets[pi] + t;
            let expected = ext.base_vertex(play.vertex_at(t));
            for v in 0..n {
                let (next, mv) = if v == expected {
                    let t2 = if t < len { t + 1 } else { play.prefix.len() + 1 };
                    (offsets[pi] + t2, ext.base_vertex(play.vertex_at(t2)))
                } else if t == 0 {
                    // States expecting position 0 are only ever entered at
                    // start-up, where the observation matches; stay put.
                    (s, game.arena.succ(v)[0])
                } else {
                    let prev = play.vertex_at(t - 1);
                    let prev_base = ext.base_vertex(prev);
                    if game.arena.has_edge(prev_base, v) {
                        let deviator = game.arena.owner(prev_base);
                        let landed = ext
                            .vertex(v, ext.served(prev).union(game.arena.targets_at(v)))
                            .expect("extension is closed under base successors");
                        let kappa = index[&(deviator, landed)];
                        (
                            offsets[kappa] + 1,
                            ext.base_vertex(plays[kappa].vertex_at(1)),
                        )
                    } else {
                        // Not a successor of the previous vertex: impossible
                        // along real plays; stay put.
                        (s, game.arena.succ(v)[0])
                    }
                };
                update[s][v] = next;
                planned[s][v] = mv;
            }
        }
    }
    let machines = (0..game.players())
        .map(|j| {
            let moves = (0..total)
                .map(|s| {
                    (0..n)
                        .map(|v| (game.arena.owner(v) == j).then_some(planned[s][v]))
                        .collect()
                })
                .collect();
            StrategyMachine {
                player: j,
                state_names: state_names.clone(),
                initial: 0,
                update: update.clone(),
                moves,
            }
        })
        .collect();
    Ok(machines)
}

/// Independent subgame-perfection check of a machine profile: explore every
/// configuration reachable under *arbitrary* moves (tracking the set of
/// players served along the way), and require at each of them that no
/// still-unserved player's best response beats the composed continuation.
/// Served players are exempt — their cost is already settled.
pub fn verify_spe(game: &Game, machines: &MachineProfile) -> Result<bool> {
    validate_profile(game, machines)?;
    let start = (
        initial_config(game, machines),
        game.arena.targets_at(game.init),
    );
    let mut seen: HashSet<(Config, PlayerSet)> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    let mut outcomes: HashMap<Config, Lasso> = HashMap::new();
    let mut responses: HashMap<(Config, Player), Cost> = HashMap::new();
    while let Some((config, served)) = queue.pop_front() {
        if seen.len() > VERIFY_CAP {
            return Err(Error::SizeCap(VERIFY_CAP));
        }
        for i in 0..game.players() {
            if served.contains(i) {
                continue;
            }
            let outcome = match outcomes.get(&config) {
                Some(o) => o,
                None => {
                    let o = composed_outcome_from(game, machines, config.clone())?;
                    outcomes.entry(config.clone()).or_insert(o)
                }
            };
            let on_path = residual_cost(game, outcome, 0, i);
            let best = match responses.get(&(config.clone(), i)) {
                Some(&b) => b,
                None => {
                    let b = best_response_from(game, machines, i, config.clone())?;
                    responses.insert((config.clone(), i), b);
                    b
                }
            };
            let improves = match game.mode {
                Mode::Quantitative => best < on_path,
                Mode::Qualitative => best.is_finite() && !on_path.is_finite(),
            };
            if improves {
                return Ok(false);
            }
        }
        let v = config.0;
        for &w in game.arena.succ(v) {
            let next = (
                advance_config(machines, &config, w),
                served.union(game.arena.targets_at(w)),
            );
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(true)
}

fn reachable_set(game: &Game, from: VertexId, reversed: bool) -> Vec<bool> {
    let n = game.n_vertices();
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for v in 0..n {
        for &w in game.arena.succ(v) {
            if reversed {
                adj[w].push(v);
            } else {
                adj[v].push(w);
            }
        }
    }
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Shortest path from `from` to a goal vertex (both endpoints included),
/// breaking ties by breadth-first discovery order over the name-sorted
/// successor lists.
fn shortest_path(game: &Game, from: VertexId, goal: impl Fn(VertexId) -> bool) -> Option<Vec<VertexId>> {
    let n = game.n_vertices();
    let mut parent: Vec<Option<VertexId>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    let mut hit = if goal(from) { Some(from) } else { None };
    while hit.is_none() {
        let v = queue.pop_front()?;
        for &w in game.arena.succ(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                if goal(w) {
                    hit = Some(w);
                    break;
                }
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![hit?];
    while let Some(p) = parent[*path.last().unwrap()] {
        path.push(p);
    }
    path.reverse();
    Some(path)
}

/// Constructive equilibrium for strongly connected qualitative games: a
/// cyclic tour from the initial vertex through one target vertex of every
/// player who has any, realized by machines that replay the tour and, after
/// any deviation, walk back to the initial vertex and restart it. Everyone
/// with a nonempty target set is served on every lap, so no deviation can
/// ever improve a gain and the profile is subgame-perfect outright.
pub fn visit_all_spe_qual(game: &Game) -> Result<(MachineProfile, Lasso)> {
    if game.mode != Mode::Qualitative {
        return Err(Error::BadQuery(
            "the visit-everything construction applies to qualitative games".to_string(),
        ));
    }
    let n = game.n_vertices();
    let forward = reachable_set(game, game.init, false);
    if let Some(v) = (0..n).find(|&v| !forward[v]) {
        return Err(Error::NotStronglyConnected(game.arena.name(v).to_string()));
    }
    let backward = reachable_set(game, game.init, true);
    if let Some(v) = (0..n).find(|&v| !backward[v]) {
        return Err(Error::NotStronglyConnected(game.arena.name(v).to_string()));
    }
    let v0 = game.init;

    // The tour: shortest hops to each still-unvisited target set in player
    // order, then home.
    let mut walk = vec![v0];
    for i in 0..game.players() {
        if (0..n).all(|v| !game.arena.is_target(v, i)) {
            continue;
        }
        if walk.iter().any(|&v| game.arena.is_target(v, i)) {
            continue;
        }
        let cur = *walk.last().unwrap();
        let path = shortest_path(game, cur, |v| game.arena.is_target(v, i))
            .expect("targets are reachable in a strongly connected arena");
        walk.extend(&path[1..]);
    }
    let cur = *walk.last().unwrap();
    if cur != v0 {
        let path =
            shortest_path(game, cur, |v| v == v0).expect("strongly connected arenas close tours");
        walk.extend(&path[1..]);
    } else if walk.len() == 1 {
        // Nobody to visit: the tour is the shortest nontrivial return.
        let mut best: Option<Vec<VertexId>> = None;
        for &w in game.arena.succ(v0) {
            let mut path = vec![v0];
            if w == v0 {
                path.push(v0);
            } else {
                path.extend(
                    shortest_path(game, w, |v| v == v0).expect("strongly connected"),
                );
            }
            if best.as_ref().is_none_or(|b| path.len() < b.len()) {
                best = Some(path);
            }
        }
        walk = best.expect("sink-free arenas have successors");
    }
    let cycle: Vec<VertexId> = walk[..walk.len() - 1].to_vec();
    let lasso = Lasso::new(Vec::new(), cycle.clone());

    // Per-vertex hop toward the initial vertex, for the recovery walk.
    let mut dist = vec![usize::MAX; n];
    let mut preds: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for v in 0..n {
        for &w in game.arena.succ(v) {
            preds[w].push(v);
        }
    }
    dist[v0] = 0;
    let mut queue = VecDeque::from([v0]);
    while let Some(v) = queue.pop_front() {
        for &u in &preds[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let hop: Vec<VertexId> = (0..n)
        .map(|v| {
            *game
                .arena
                .succ(v)
                .iter()
                .min_by_key(|&&w| dist[w])
                .expect("sink-free")
        })
        .collect();

    // Machines: one state per tour position plus a recovery state. Seeing
    // the expected tour vertex advances the tour; seeing the initial vertex
    // anywhere else restarts it; anything else walks home.
    let l = cycle.len();
    let recover = l;
    let state_names: Vec<String> = (0..l)
        .map(|t| format!("t{t}"))
        .chain(std::iter::once("recover".to_string()))
        .collect();
    let mut update = vec![vec![0usize; n]; l + 1];
    let mut planned = vec![vec![0 as VertexId; n]; l + 1];
    for s in 0..=l {
        for v in 0..n {
            let (next, mv) = if s < l && v == cycle[s] {
                ((s + 1) % l, cycle[(s + 1) % l])
            } else if v == v0 {
                (1 % l, cycle[1 % l])
            } else {
                (recover, hop[v])
            };
            update[s][v] = next;
            planned[s][v] = mv;
        }
    }
    let machines = (0..game.players())
        .map(|j| {
            let moves = (0..=l)
                .map(|s| {
                    (0..n)
                        .map(|v| (game.arena.owner(v) == j).then_some(planned[s][v]))
                        .collect()
                })
                .collect();
            StrategyMachine {
                player: j,
                state_names: state_names.clone(),
                initial: 0,
                update: update.clone(),
                moves,
            }
        })
        .collect();
    Ok((machines, lasso))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_game, parse_lasso};
    use crate::game::{cost_or_gain_profile, Profile};
    use crate::machine::{composed_outcome, verify_ne};
    use crate::ne::Bound;

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

    fn ex_game_qual() -> Game {
        parse_game(&EX.replace("game quantitative", "game qualitative")).expect("fixture parses")
    }

    #[test]
    fn chain_labels_count_remaining_distance() {
        let g = parse_game(
            "game quantitative\nplayers 1\n\
             vertex v0 owner=1\nvertex v1 owner=1\nvertex v2 owner=1 targets=1\n\
             edge v0 v1\nedge v1 v2\nedge v2 v2\ninit v0\n",
        )
        .unwrap();
        let spe = analyze(&g).unwrap();
        let at = |name: &str, served: PlayerSet| {
            let v = g.arena.vertex_id(name).unwrap();
            let x = spe.ext.vertex(v, served).unwrap();
            spe.lambda.get(&spe.ext.game, x).unwrap()
        };
        assert_eq!(at("v0", PlayerSet::EMPTY), Cost::Finite(2));
        assert_eq!(at("v1", PlayerSet::EMPTY), Cost::Finite(1));
        let served = {
            let mut s = PlayerSet::EMPTY;
            s.insert(0);
            s
        };
        assert_eq!(at("v2", served), Cost::Infinite);

        let yes = decide_spe(
            &g,
            &Query::Threshold {
                upper: vec![Some(Bound::new(Cost::Finite(2)))],
                lower: vec![None],
            },
            1,
        )
        .unwrap();
        assert!(yes.yes);
        let machines = yes.machines.expect("witness machines attached");
        assert!(verify_spe(&g, &machines).unwrap());
        assert_eq!(
            composed_outcome(&g, &machines).unwrap().canonicalize(),
            yes.lasso.unwrap().canonicalize()
        );

        let no = decide_spe(
            &g,
            &Query::Threshold {
                upper: vec![Some(Bound::new(Cost::Finite(1)))],
                lower: vec![None],
            },
            1,
        )
        .unwrap();
        assert!(!no.yes);
    }

    #[test]
    fn pareto_front_remains_unattainable() {
        let g = ex_game();
        let verdict = decide_spe(&g, &Query::Pareto, 1).unwrap();
        assert!(!verdict.yes);
        let front = verdict.front.expect("front always reported");
        assert_eq!(
            front,
            vec![
                Profile(vec![Cost::Finite(2), Cost::Finite(6)]),
                Profile(vec![Cost::Finite(3), Cost::Finite(3)]),
            ]
        );
    }

    #[test]
    fn short_profile_is_rejected_for_subgame_perfect_play_too() {
        let g = ex_game();
        let spe = analyze(&g).unwrap();
        let l = parse_lasso(&g, "| v0 v2 v2_v4_1 v4").unwrap();
        assert!(!is_spe_outcome(&g, &spe, &l).unwrap());
        // Its witness is refused outright.
        match build_witness(&g, &spe, &l) {
            Err(Error::NotEquilibriumOutcome { .. }) => {}
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn trivial_threshold_produces_verified_machines() {
        let g = ex_game();
        let verdict = decide_spe(
            &g,
            &Query::Threshold {
                upper: vec![None, None],
                lower: vec![None, None],
            },
            1,
        )
        .unwrap();
        assert!(verdict.yes, "equilibria always exist");
        let lasso = verdict.lasso.expect("witness play");
        let machines = verdict.machines.expect("witness machines");
        assert_eq!(
            composed_outcome(&g, &machines).unwrap().canonicalize(),
            lasso.canonicalize()
        );
        assert!(verify_spe(&g, &machines).unwrap());
        // Subgame-perfect profiles are equilibria in particular.
        assert!(verify_ne(&g, &machines).unwrap());
        assert_eq!(
            cost_or_gain_profile(&g, &lasso),
            verdict.profile.expect("profile reported")
        );
    }

    #[test]
    fn qualitative_tour_passes_every_check() {
        let g = ex_game_qual();
        // Both players can be served at once.
        let both = decide_spe(
            &g,
            &Query::Threshold {
                upper: vec![None, None],
                lower: vec![
                    Some(Bound::new(Cost::Finite(1))),
                    Some(Bound::new(Cost::Finite(1))),
                ],
            },
            1,
        )
        .unwrap();
        assert!(both.yes);

        let (machines, lasso) = visit_all_spe_qual(&g).unwrap();
        assert!(verify_spe(&g, &machines).unwrap());
        let outcome = composed_outcome(&g, &machines).unwrap();
        assert_eq!(outcome.canonicalize(), lasso.canonicalize());
        assert_eq!(
            cost_or_gain_profile(&g, &lasso).gains(),
            vec![1, 1],
            "every nonempty target set is visited"
        );

        // The tour is itself an accepted outcome whose witness survives the
        // whole pipeline.
        let spe = analyze(&g).unwrap();
        assert!(is_spe_outcome(&g, &spe, &lasso).unwrap());
        let witness = build_witness(&g, &spe, &lasso).unwrap();
        for play in witness.punish.values() {
            assert!(
                lambda_consistent(&spe.ext.game, &spe.lambda, play)
                    .unwrap()
                    .consistent,
                "punishment plays are consistent by construction"
            );
        }
        assert!(check_good(&spe, &witness));
        let machines = synthesize_spe_machines(&g, &spe, &witness).unwrap();
        assert!(verify_spe(&g, &machines).unwrap());
        assert_eq!(
            composed_outcome(&g, &machines).unwrap().canonicalize(),
            lasso.canonicalize()
        );
    }

    #[test]
    fn corrupting_the_family_is_caught() {
        let g = ex_game();
        let spe = analyze(&g).unwrap();
        let verdict = decide_spe(
            &g,
            &Query::Threshold {
                upper: vec![None, None],
                lower: vec![None, None],
            },
            1,
        )
        .unwrap();
        let mut witness = build_witness(&g, &spe, &verdict.lasso.unwrap()).unwrap();
        assert!(check_good(&spe, &witness));
        // Planting a rejected play as the root breaks the one-step
        // inequality at its violating position.
        let bad = parse_lasso(&g, "| v0 v2 v2_v4_1 v4").unwrap();
        witness.root = lift_lasso(&spe.ext, &g, &bad).unwrap();
        assert!(!check_good(&spe, &witness));
        match synthesize_spe_machines(&g, &spe, &witness) {
            Err(Error::WitnessNotGood(_)) => {}
            other => panic!("expected goodness failure, got {other:?}"),
        }
    }

    #[test]
    fn split_arenas_refuse_the_tour() {
        // Two players, each with their own absorbing target: no tour can
        // serve both.
        let g = parse_game(
            "game qualitative\nplayers 2\n\
             vertex v0 owner=1\nvertex v1 owner=2 targets=1\nvertex v2 owner=2 targets=2\n\
             edge v0 v1\nedge v0 v2\nedge v1 v1\nedge v2 v2\ninit v0\n",
        )
        .unwrap();
        match visit_all_spe_qual(&g) {
            Err(Error::NotStronglyConnected(_)) => {}
            other => panic!("expected connectivity refusal, got {other:?}"),
        }
        // Quantitative games are refused up front.
        match visit_all_spe_qual(&ex_game()) {
            Err(Error::BadQuery(_)) => {}
            other => panic!("expected mode refusal, got {other:?}"),
        }
    }
}
