//! Game arenas, plays and their costs.
//!
//! A game is played on a finite directed graph without sinks. Every vertex
//! belongs to exactly one player; whoever owns the current vertex picks the
//! next edge, forever. Each player has a set of target vertices and pays the
//! number of edges taken until the first visit of their set (`+∞` when the
//! play never visits it). In the qualitative reading the same data is scored
//! as a gain of 1 (visited) or 0 (not visited).
//!
//! Ultimately periodic plays are represented as lassoes: a finite prefix
//! followed by a cycle repeated forever. All decision procedures in this
//! crate work on bounded sets of lassoes.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::cost::Cost;
use crate::error::{Error, Result};

/// Index of a vertex inside an [`Arena`].
pub type VertexId = usize;

/// Player indices are 0-based internally and 1-based in every text format.
pub type Player = usize;

/// How a play is scored.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    /// Cost = number of edges until the first target visit, minimized.
    Quantitative,
    /// Gain = 1 if the target set is visited at all, maximized.
    Qualitative,
}

/// A set of players, stored as a bitmask. Games are capped at 64 players.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Debug)]
pub struct PlayerSet(pub u64);

impl PlayerSet {
    pub const EMPTY: PlayerSet = PlayerSet(0);

    pub fn singleton(p: Player) -> PlayerSet {
        PlayerSet(1 << p)
    }

    pub fn full(players: usize) -> PlayerSet {
        if players == 64 {
            PlayerSet(u64::MAX)
        } else {
            PlayerSet((1u64 << players) - 1)
        }
    }

    pub fn contains(self, p: Player) -> bool {
        self.0 & (1 << p) != 0
    }

    pub fn insert(&mut self, p: Player) {
        self.0 |= 1 << p;
    }

    pub fn union(self, other: PlayerSet) -> PlayerSet {
        PlayerSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: PlayerSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn without(self, other: PlayerSet) -> PlayerSet {
        PlayerSet(self.0 & !other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Player> {
        (0..64).filter(move |p| self.contains(*p))
    }
}

impl fmt::Display for PlayerSet {
    /// Players are printed 1-based, e.g. `{1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, p) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p + 1)?;
        }
        write!(f, "}}")
    }
}

/// The graph of a game: vertices with owners and target memberships, plus
/// sorted successor lists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arena {
    pub players: usize,
    names: Vec<String>,
    owner: Vec<Player>,
    targets: Vec<PlayerSet>,
    succ: Vec<Vec<VertexId>>,
    index: HashMap<String, VertexId>,
}

impl Arena {
    /// Builds an arena from vertex descriptions and edges. Successor lists
    /// are kept sorted by vertex name so that every enumeration in the crate
    /// is deterministic.
    pub fn new(
        players: usize,
        vertices: Vec<(String, Player, PlayerSet)>,
        edges: &[(VertexId, VertexId)],
    ) -> Result<Arena> {
        if players == 0 || players > 64 {
            return Err(Error::BadQuery(format!(
                "player count must be between 1 and 64, got {players}"
            )));
        }
        let mut names = Vec::with_capacity(vertices.len());
        let mut owner = Vec::with_capacity(vertices.len());
        let mut targets = Vec::with_capacity(vertices.len());
        let mut index = HashMap::new();
        for (name, o, t) in vertices {
            if o >= players {
                return Err(Error::OwnerOutOfRange {
                    owner: o + 1,
                    players,
                });
            }
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(Error::BadQuery(format!("duplicate vertex `{name}`")));
            }
            names.push(name);
            owner.push(o);
            targets.push(t);
        }
        let mut succ = vec![Vec::new(); names.len()];
        for &(u, v) in edges {
            if !succ[u].contains(&v) {
                succ[u].push(v);
            }
        }
        for (v, list) in succ.iter_mut().enumerate() {
            if list.is_empty() {
                return Err(Error::NoSuccessor(names[v].clone()));
            }
            list.sort_by(|a, b| names[*a].cmp(&names[*b]));
        }
        Ok(Arena {
            players,
            names,
            owner,
            targets,
            succ,
            index,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.owner[v]
    }

    pub fn targets_at(&self, v: VertexId) -> PlayerSet {
        self.targets[v]
    }

    pub fn is_target(&self, v: VertexId, p: Player) -> bool {
        self.targets[v].contains(p)
    }

    pub fn succ(&self, v: VertexId) -> &[VertexId] {
        &self.succ[v]
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.succ[u].contains(&v)
    }

    /// Target set of one player, in vertex order.
    pub fn target_set(&self, p: Player) -> Vec<VertexId> {
        (0..self.n_vertices())
            .filter(|&v| self.is_target(v, p))
            .collect()
    }
}

/// An initialized game: arena, scoring mode and initial vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Game {
    pub arena: Arena,
    pub mode: Mode,
    pub init: VertexId,
}

impl Game {
    pub fn players(&self) -> usize {
        self.arena.players
    }

    pub fn n_vertices(&self) -> usize {
        self.arena.n_vertices()
    }

    /// Default search bound for normalized lassoes: `(players + 1) * |V|`.
    /// Every play can be rewritten, without increasing any cost, into a lasso
    /// of at most this length, so bounded enumeration is complete for the
    /// decision problems.
    pub fn lasso_bound(&self) -> usize {
        (self.players() + 1) * self.n_vertices()
    }
}

/// An ultimately periodic play `prefix · cycle^ω`.
///
/// The length of a lasso is `prefix.len() + cycle.len()`, i.e. the number of
/// edges of one full traversal including the edge closing the cycle.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Lasso {
    pub prefix: Vec<VertexId>,
    pub cycle: Vec<VertexId>,
}

impl Lasso {
    pub fn new(prefix: Vec<VertexId>, cycle: Vec<VertexId>) -> Lasso {
        Lasso { prefix, cycle }
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first_vertex(&self) -> VertexId {
        *self.prefix.first().unwrap_or(&self.cycle[0])
    }

    /// Vertex at position `t` of the infinite play.
    pub fn vertex_at(&self, t: usize) -> VertexId {
        if t < self.prefix.len() {
            self.prefix[t]
        } else {
            self.cycle[(t - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The first `n` vertices of the play.
    pub fn window(&self, n: usize) -> Vec<VertexId> {
        (0..n).map(|t| self.vertex_at(t)).collect()
    }

    /// Checks that the lasso is a real play of the game: nonempty cycle and
    /// every consecutive pair (including the closing edge) is an edge.
    pub fn validate(&self, game: &Game) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::InvalidLasso("cycle part is empty".into()));
        }
        let path: Vec<VertexId> = self
            .prefix
            .iter()
            .chain(self.cycle.iter())
            .copied()
            .collect();
        for w in path.windows(2) {
            if !game.arena.has_edge(w[0], w[1]) {
                return Err(Error::InvalidLasso(format!(
                    "no edge from `{}` to `{}`",
                    game.arena.name(w[0]),
                    game.arena.name(w[1])
                )));
            }
        }
        let last = *path.last().unwrap();
        if !game.arena.has_edge(last, self.cycle[0]) {
            return Err(Error::InvalidLasso(format!(
                "no closing edge from `{}` to `{}`",
                game.arena.name(last),
                game.arena.name(self.cycle[0])
            )));
        }
        Ok(())
    }

    /// Rewrites the representation into the canonical one for the same play:
    /// primitive cycle, and the shortest prefix among all splits with that
    /// cycle. Two lassoes denote the same play iff their canonical forms are
    /// equal.
    pub fn canonicalize(&self) -> Lasso {
        let mut prefix = self.prefix.clone();
        let mut cycle = self.cycle.clone();
        // Reduce the cycle to its primitive root.
        let n = cycle.len();
        for d in 1..=n / 2 {
            if n % d == 0 && (d..n).all(|k| cycle[k] == cycle[k - d]) {
                cycle.truncate(d);
                break;
            }
        }
        // Rotate the cycle left into the prefix while the last prefix vertex
        // matches the last cycle vertex.
        while let Some(&last) = prefix.last() {
            if last == *cycle.last().unwrap() {
                prefix.pop();
                let tail = cycle.pop().unwrap();
                cycle.insert(0, tail);
            } else {
                break;
            }
        }
        Lasso { prefix, cycle }
    }

    /// Deterministic ordering key: shorter lassoes first, then by the name
    /// sequence of one traversal.
    pub fn order_key(&self, game: &Game) -> (usize, Vec<String>) {
        let names = self
            .prefix
            .iter()
            .chain(self.cycle.iter())
            .map(|&v| game.arena.name(v).to_string())
            .collect();
        (self.len(), names)
    }

    pub fn display<'a>(&'a self, game: &'a Game) -> LassoDisplay<'a> {
        LassoDisplay { lasso: self, game }
    }
}

pub struct LassoDisplay<'a> {
    lasso: &'a Lasso,
    game: &'a Game,
}

impl fmt::Display for LassoDisplay<'_> {
    /// Text form `prefix | cycle`. A pure cycle is printed with a leading
    /// pipe, e.g. `| v0 v2 v4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: &VertexId| self.game.arena.name(*v);
        for v in &self.lasso.prefix {
            write!(f, "{} ", name(v))?;
        }
        write!(f, "|")?;
        for v in &self.lasso.cycle {
            write!(f, " {}", name(v))?;
        }
        Ok(())
    }
}

/// One cost (or gain, in qualitative mode) per player.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Profile(pub Vec<Cost>);

impl Profile {
    pub fn leq(&self, other: &Profile) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise order used for Pareto comparisons: in quantitative mode
    /// lower costs dominate, in qualitative mode higher gains dominate.
    pub fn dominates(&self, other: &Profile, mode: Mode) -> bool {
        match mode {
            Mode::Quantitative => self.leq(other) && self != other,
            Mode::Qualitative => {
                let ga: Vec<u8> = self.0.iter().map(|c| c.gain()).collect();
                let gb: Vec<u8> = other.0.iter().map(|c| c.gain()).collect();
                ga.iter().zip(&gb).all(|(a, b)| a >= b) && ga != gb
            }
        }
    }

    pub fn gains(&self) -> Vec<u8> {
        self.0.iter().map(|c| c.gain()).collect()
    }

    /// Comma-separated rendering: costs in quantitative mode, 0/1 gains in
    /// qualitative mode.
    pub fn render(&self, mode: Mode) -> String {
        let parts: Vec<String> = match mode {
            Mode::Quantitative => self.0.iter().map(|c| c.to_string()).collect(),
            Mode::Qualitative => self.gains().iter().map(|g| g.to_string()).collect(),
        };
        parts.join(",")
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Social welfare of a play: how many players visit their target set, and
/// the summed costs of those players. A welfare is socially better when it
/// has more visitors, with ties broken by the smaller sum; `Ord` is arranged
/// so that *greater means better*.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Welfare {
    pub visitors: usize,
    pub total: u64,
}

impl Ord for Welfare {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.visitors
            .cmp(&other.visitors)
            .then(other.total.cmp(&self.total))
    }
}

impl PartialOrd for Welfare {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Welfare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.visitors, self.total)
    }
}

/// Players whose target set the play visits.
pub fn visit_set(game: &Game, lasso: &Lasso) -> PlayerSet {
    let mut set = PlayerSet::EMPTY;
    for v in lasso.prefix.iter().chain(lasso.cycle.iter()) {
        set = set.union(game.arena.targets_at(*v));
    }
    set
}

/// Cost profile of the play: for each player the position of the first
/// visit of their target set, or `+∞`. In qualitative mode the profile is
/// read through [`Cost::gain`]; the stored positions are the same.
pub fn cost_or_gain_profile(game: &Game, lasso: &Lasso) -> Profile {
    let window = lasso.len();
    let mut costs = vec![Cost::Infinite; game.players()];
    for t in 0..window {
        let v = lasso.vertex_at(t);
        for p in game.arena.targets_at(v).iter() {
            if costs[p] == Cost::Infinite {
                costs[p] = Cost::Finite(t as u64);
            }
        }
    }
    Profile(costs)
}

/// Social welfare of the play. In qualitative mode only the visitor count is
/// meaningful and the total is reported as 0.
pub fn social_welfare(game: &Game, lasso: &Lasso) -> Welfare {
    let profile = cost_or_gain_profile(game, lasso);
    let visitors = profile.0.iter().filter(|c| c.is_finite()).count();
    let total = match game.mode {
        Mode::Qualitative => 0,
        Mode::Quantitative => profile.0.iter().filter_map(|c| c.finite()).sum(),
    };
    Welfare { visitors, total }
}

/// Outcome of a search callback: keep going or stop with a result.
pub enum Search<R> {
    Continue,
    Done(R),
}

/// Depth-first enumeration of all distinct ultimately periodic plays from
/// `from` whose canonical lasso has length at most `max_len`.
///
/// Every play is reported exactly once, in canonical form, in a
/// deterministic order (successors are explored in name order). Memory use
/// is bounded by the walk depth: a play is reported at the first walk that
/// closes it, which is exactly the walk spelling its canonical lasso, so no
/// record of already-reported plays is needed. `visit` may stop the search
/// early.
pub fn search_lassoes<R>(
    game: &Game,
    from: VertexId,
    max_len: usize,
    visit: impl FnMut(&Lasso) -> Search<R>,
) -> Option<R> {
    search_lassoes_pruned(game, from, max_len, |_| false, visit)
}

/// Like [`search_lassoes`], with a pruning hook: whenever `prune` returns
/// true for the current path (a play prefix starting at `from`), neither
/// cycle closures of that path nor any extension of it are considered.
pub fn search_lassoes_pruned<R>(
    game: &Game,
    from: VertexId,
    max_len: usize,
    mut prune: impl FnMut(&[VertexId]) -> bool,
    mut visit: impl FnMut(&Lasso) -> Search<R>,
) -> Option<R> {
    if max_len == 0 {
        // Every play has at least a one-vertex cycle.
        return None;
    }
    let mut seq: Vec<VertexId> = vec![from];
    if prune(&seq) {
        return None;
    }
    search_rec(game, max_len, &mut seq, &mut prune, &mut visit)
}

/// Is the split `(seq[..p], seq[p..])` the canonical lasso of its play?
/// Mirrors [`Lasso::canonicalize`]: the cycle must be primitive and the
/// boundary must not rotate left. Any walk closing to a given play is an
/// initial segment of that play, so among them exactly one split passes.
fn closure_is_canonical(seq: &[VertexId], p: usize) -> bool {
    let cycle = &seq[p..];
    let n = cycle.len();
    for d in 1..=n / 2 {
        if n % d == 0 && (d..n).all(|k| cycle[k] == cycle[k - d]) {
            return false;
        }
    }
    p == 0 || seq[p - 1] != seq[seq.len() - 1]
}

fn search_rec<R>(
    game: &Game,
    max_len: usize,
    seq: &mut Vec<VertexId>,
    prune: &mut impl FnMut(&[VertexId]) -> bool,
    visit: &mut impl FnMut(&Lasso) -> Search<R>,
) -> Option<R> {
    let last = *seq.last().unwrap();
    for k in 0..game.arena.succ(last).len() {
        let v = game.arena.succ(last)[k];
        // Closing the cycle at every earlier occurrence of `v` yields a
        // candidate play; only its canonical closure is reported.
        for p in 0..seq.len() {
            if seq[p] == v && closure_is_canonical(seq, p) {
                let lasso = Lasso {
                    prefix: seq[..p].to_vec(),
                    cycle: seq[p..].to_vec(),
                };
                match visit(&lasso) {
                    Search::Continue => {}
                    Search::Done(r) => return Some(r),
                }
            }
        }
        if seq.len() < max_len {
            seq.push(v);
            let out = if prune(seq) {
                None
            } else {
                search_rec(game, max_len, seq, prune, visit)
            };
            seq.pop();
            if out.is_some() {
                return out;
            }
        }
    }
    None
}

/// Enumerates the distinct plays from `from` with canonical length at most
/// `max_len`.
///
/// With `visits_in_prefix` set, each play is re-split so that every first
/// target visit lies in the prefix and the cycle starts at the first vertex
/// repetition after the last of them (the closed form produced by
/// [`crate::lasso_ops::apply_p2`]); plays whose re-split form exceeds
/// `max_len` are dropped.
pub fn enumerate_lassoes(
    game: &Game,
    from: VertexId,
    max_len: usize,
    visits_in_prefix: bool,
) -> Vec<Lasso> {
    let mut out = Vec::new();
    search_lassoes(game, from, max_len, |lasso| {
        if visits_in_prefix {
            let split = crate::lasso_ops::apply_p2(game, lasso);
            if split.len() <= max_len {
                out.push(split);
            }
        } else {
            out.push(lasso.clone());
        }
        Search::Continue::<()>
    });
    if visits_in_prefix {
        // Re-splitting can map two canonical plays of different lengths to
        // the same form only if they were equal; still, keep order stable
        // and unique.
        let mut seen = HashSet::new();
        out.retain(|l| seen.insert(l.clone()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_game;

    fn tiny(text: &str) -> Game {
        parse_game(text).expect("fixture parses")
    }

    const LOOP1: &str = "\
game quantitative
players 1
vertex v0 owner=1
edge v0 v0
init v0
";

    #[test]
    fn single_self_loop_enumeration() {
        let g = tiny(LOOP1);
        assert_eq!(enumerate_lassoes(&g, g.init, 0, false), Vec::<Lasso>::new());
        let ls = enumerate_lassoes(&g, g.init, 1, false);
        assert_eq!(ls.len(), 1);
        assert_eq!(ls[0].prefix, Vec::<usize>::new());
        assert_eq!(ls[0].cycle, vec![g.init]);
    }

    #[test]
    fn canonical_form_is_primitive_and_left_shifted() {
        let l = Lasso::new(vec![0, 1], vec![2, 1, 2, 1]);
        let c = l.canonicalize();
        assert_eq!(c.prefix, vec![0]);
        assert_eq!(c.cycle, vec![1, 2]);
        let l2 = Lasso::new(vec![], vec![3, 3]);
        assert_eq!(l2.canonicalize().cycle, vec![3]);
    }

    #[test]
    fn enumeration_is_duplicate_free_and_complete_on_a_diamond() {
        let g = tiny(
            "game quantitative\nplayers 2\n\
             vertex a owner=1\nvertex b owner=2 targets=1\nvertex c owner=1 targets=2\n\
             edge a b\nedge a c\nedge b a\nedge c c\ninit a\n",
        );
        let ls = enumerate_lassoes(&g, g.init, 4, false);
        let mut seen = HashSet::new();
        for l in &ls {
            assert!(seen.insert(l.clone()), "duplicate play {:?}", l);
            assert_eq!(*l, l.canonicalize(), "not canonical: {:?}", l);
            assert!(l.len() <= 4);
            l.validate(&g).unwrap();
        }
        // (a b)^ω, a (c)^ω, (a b a b is non-primitive), a b (a b...) dupes,
        // a b a (c)^ω.
        let a = g.arena.vertex_id("a").unwrap();
        let b = g.arena.vertex_id("b").unwrap();
        let c = g.arena.vertex_id("c").unwrap();
        assert!(ls.contains(&Lasso::new(vec![], vec![a, b])));
        assert!(ls.contains(&Lasso::new(vec![a], vec![c])));
        assert!(ls.contains(&Lasso::new(vec![a, b, a], vec![c])));
        assert_eq!(ls.len(), 3);
    }

    #[test]
    fn profile_and_welfare_on_a_two_player_cycle() {
        let g = tiny(
            "game quantitative\nplayers 2\n\
             vertex a owner=1\nvertex b owner=2 targets=1\nvertex c owner=1 targets=2\n\
             edge a b\nedge b c\nedge c a\ninit a\n",
        );
        let l = Lasso::new(
            vec![],
            vec![
                g.arena.vertex_id("a").unwrap(),
                g.arena.vertex_id("b").unwrap(),
                g.arena.vertex_id("c").unwrap(),
            ],
        );
        let p = cost_or_gain_profile(&g, &l);
        assert_eq!(p.0, vec![Cost::Finite(1), Cost::Finite(2)]);
        assert_eq!(visit_set(&g, &l), PlayerSet::full(2));
        let w = social_welfare(&g, &l);
        assert_eq!((w.visitors, w.total), (2, 3));
    }

    #[test]
    fn welfare_order_prefers_visitors_then_small_total() {
        let a = Welfare {
            visitors: 2,
            total: 9,
        };
        let b = Welfare {
            visitors: 1,
            total: 0,
        };
        let c = Welfare {
            visitors: 2,
            total: 5,
        };
        assert!(a > b);
        assert!(c > a);
    }
}
