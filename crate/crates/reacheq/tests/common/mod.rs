//! Fixtures and helpers shared by the integration suites.
#![allow(dead_code)] // each suite uses its own subset

use reacheq::format::parse_game;
use reacheq::game::{Game, Lasso, VertexId};
use reacheq::machine::{MachineProfile, StrategyMachine};

/// Two-player quantitative running example: player 2 chooses at `v0`
/// between a 3-step corridor to `v1` (serving player 2) and the branch
/// through `v2`, where player 1 picks between `v3` (serving player 1
/// only) and a 2-step corridor to `v4` (serving both).
pub const QUANT_EX: &str = "\
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

/// Qualitative fork: player 1 picks one of two absorbing branches, each
/// serving a different player.
pub const QUAL_FORK: &str = "\
game qualitative
players 2
vertex v0 owner=1
vertex v1 owner=2 targets=1
vertex v2 owner=2 targets=2
edge v0 v1
edge v0 v2
edge v1 v1
edge v2 v2
init v0
";

/// Three-player qualitative tree with four absorbing leaves; the two
/// undominated leaf profiles are unreachable by deviation-proof play.
pub const QUAL_TREE: &str = "\
game qualitative
players 3
vertex v0 owner=1
vertex v1 owner=2
vertex v2 owner=3
vertex v3 owner=1 targets=2
vertex v4 owner=1 targets=1,3
vertex v5 owner=1 targets=1,2
vertex v6 owner=1 targets=3
edge v0 v1
edge v0 v2
edge v1 v3
edge v1 v4
edge v2 v5
edge v2 v6
edge v3 v3
edge v4 v4
edge v5 v5
edge v6 v6
init v0
";

pub fn quant_ex() -> Game {
    parse_game(QUANT_EX).expect("fixture parses")
}

pub fn qual_fork() -> Game {
    parse_game(QUAL_FORK).expect("fixture parses")
}

pub fn qual_tree() -> Game {
    parse_game(QUAL_TREE).expect("fixture parses")
}

/// Every lasso from the initial vertex with at most `max_len` distinct
/// positions: walks of length up to `max_len` paired with every closing
/// split point whose back edge exists. Distinct (prefix, cycle) pairs only.
pub fn enumerate_lassos(game: &Game, max_len: usize) -> Vec<Lasso> {
    fn rec(game: &Game, path: &mut Vec<VertexId>, max_len: usize, out: &mut Vec<Lasso>) {
        let last = *path.last().unwrap();
        for k in 0..path.len() {
            if game.arena.has_edge(last, path[k]) {
                out.push(Lasso::new(path[..k].to_vec(), path[k..].to_vec()));
            }
        }
        if path.len() < max_len {
            for t in 0..game.arena.succ(last).len() {
                let w = game.arena.succ(last)[t];
                path.push(w);
                rec(game, path, max_len, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(game, &mut vec![game.init], max_len, &mut out);
    out
}

/// Minimal representative of the play a lasso denotes: primitive cycle,
/// rotated so that the prefix is as short as possible. Two lassos denote
/// the same play exactly when their canonical forms are equal.
pub fn canonical_play(lasso: &Lasso) -> (Vec<VertexId>, Vec<VertexId>) {
    let mut prefix = lasso.prefix.clone();
    let mut cycle = lasso.cycle.clone();
    let n = cycle.len();
    for d in 1..=n {
        if n % d == 0 && (0..n).all(|t| cycle[t] == cycle[t % d]) {
            cycle.truncate(d);
            break;
        }
    }
    while prefix.last().is_some() && prefix.last() == cycle.last() {
        prefix.pop();
        let wrapped = cycle.pop().unwrap();
        cycle.insert(0, wrapped);
    }
    (prefix, cycle)
}

/// Do two lassos denote the same infinite play?
pub fn plays_equal(a: &Lasso, b: &Lasso) -> bool {
    fn gcd(x: usize, y: usize) -> usize {
        if y == 0 {
            x
        } else {
            gcd(y, x % y)
        }
    }
    let stem = a.prefix.len().max(b.prefix.len());
    let period = a.cycle.len() / gcd(a.cycle.len(), b.cycle.len()) * b.cycle.len();
    (0..stem + period).all(|t| a.vertex_at(t) == b.vertex_at(t))
}

/// All profiles of one-state machines: every combination of one successor
/// choice per vertex, assembled into a positional machine per player.
pub fn positional_profiles(game: &Game) -> Vec<MachineProfile> {
    let n = game.n_vertices();
    let degrees: Vec<usize> = (0..n).map(|v| game.arena.succ(v).len()).collect();
    let mut pick = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        let choice: Vec<Option<VertexId>> = (0..n)
            .map(|v| Some(game.arena.succ(v)[pick[v]]))
            .collect();
        out.push(
            (0..game.players())
                .map(|p| StrategyMachine::positional(game, p, &choice))
                .collect::<Vec<_>>(),
        );
        // Advance the odometer over successor choices.
        let mut v = 0;
        loop {
            if v == n {
                return out;
            }
            pick[v] += 1;
            if pick[v] < degrees[v] {
                break;
            }
            pick[v] = 0;
            v += 1;
        }
    }
}
