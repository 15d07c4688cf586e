//! Finite strategy machines, their composition, and best-response search.
//!
//! A machine for player `i` reads the play vertex by vertex. Its protocol:
//! with current state `s` and current vertex `v`, the move (only consulted
//! when `i` owns `v`) is `moves[s][v]`, and the machine then advances to
//! `update[s][v]` before the next vertex is revealed. The update function is
//! total; the move function is defined at least on the owner's vertices and
//! always returns an edge successor.
//!
//! A full profile (one machine per player) composes into a unique outcome
//! play. [`best_response_cost`] computes the least cost one player can
//! secure against the other machines by a product-graph breadth-first
//! search, which makes [`verify_ne`] an independent equilibrium check that
//! never consults the solver's own characterizations.
//!
//! Machine files are line-oriented text, one block per player:
//!
//! ```text
//! machine player=2 initial=e0
//! state e0
//! state e1
//! update e0 v0 e1     # state e0, seeing v0, becomes e1
//! move e0 v0 v2       # state e0, owning v0, moves to v2
//! end
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::game::{cost_or_gain_profile, Game, Lasso, Mode, Player, Profile, VertexId};

/// Finite-state strategy for one player.
#[derive(Clone, Debug)]
pub struct StrategyMachine {
    pub player: Player,
    pub state_names: Vec<String>,
    pub initial: usize,
    /// `update[state][vertex]` — total transition function.
    pub update: Vec<Vec<usize>>,
    /// `moves[state][vertex]` — successor to play; present on owned vertices.
    pub moves: Vec<Vec<Option<VertexId>>>,
}

impl StrategyMachine {
    pub fn n_states(&self) -> usize {
        self.state_names.len()
    }

    /// Builds the one-state machine realizing a positional strategy.
    /// `choice` gives the successor for each vertex owned by `player`.
    pub fn positional(game: &Game, player: Player, choice: &[Option<VertexId>]) -> StrategyMachine {
        let n = game.n_vertices();
        let mut moves = vec![None; n];
        for v in 0..n {
            if game.arena.owner(v) == player {
                moves[v] = choice[v];
            }
        }
        StrategyMachine {
            player,
            state_names: vec!["m0".to_string()],
            initial: 0,
            update: vec![vec![0; n]],
            moves: vec![moves],
        }
    }

    pub fn advance(&self, state: usize, v: VertexId) -> usize {
        self.update[state][v]
    }

    pub fn next_move(&self, state: usize, v: VertexId) -> Result<VertexId> {
        self.moves[state][v].ok_or_else(|| {
            Error::InvalidMachine(format!(
                "machine of player {} has no move at state `{}`, vertex {}",
                self.player + 1,
                self.state_names[state],
                v
            ))
        })
    }

    /// Structural checks: total update within range, moves defined on all
    /// owned vertices and pointing along edges.
    pub fn validate(&self, game: &Game) -> Result<()> {
        let n = game.n_vertices();
        let m = self.n_states();
        if m == 0 {
            return Err(Error::InvalidMachine("machine has no states".to_string()));
        }
        if self.player >= game.players() {
            return Err(Error::PlayerOutOfRange {
                player: self.player + 1,
                players: game.players(),
            });
        }
        if self.initial >= m || self.update.len() != m || self.moves.len() != m {
            return Err(Error::InvalidMachine("malformed state space".to_string()));
        }
        for s in 0..m {
            if self.update[s].len() != n || self.moves[s].len() != n {
                return Err(Error::InvalidMachine(format!(
                    "state `{}` tables do not cover every vertex",
                    self.state_names[s]
                )));
            }
            for v in 0..n {
                if self.update[s][v] >= m {
                    return Err(Error::InvalidMachine(format!(
                        "update out of range at state `{}`",
                        self.state_names[s]
                    )));
                }
                match self.moves[s][v] {
                    Some(w) if !game.arena.has_edge(v, w) => {
                        return Err(Error::InvalidMachine(format!(
                            "move {} -> {} at state `{}` is not an edge",
                            game.arena.name(v),
                            game.arena.name(w),
                            self.state_names[s]
                        )));
                    }
                    None if game.arena.owner(v) == self.player => {
                        return Err(Error::InvalidMachine(format!(
                            "no move for owned vertex {} at state `{}`",
                            game.arena.name(v),
                            self.state_names[s]
                        )));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// One machine per player, indexed by player.
pub type MachineProfile = Vec<StrategyMachine>;

pub fn validate_profile(game: &Game, machines: &MachineProfile) -> Result<()> {
    if machines.len() != game.players() {
        return Err(Error::InvalidMachine(format!(
            "expected {} machines, found {}",
            game.players(),
            machines.len()
        )));
    }
    for (i, m) in machines.iter().enumerate() {
        if m.player != i {
            return Err(Error::InvalidMachine(format!(
                "machine at position {} belongs to player {}",
                i + 1,
                m.player + 1
            )));
        }
        m.validate(game)?;
    }
    Ok(())
}

/// A composed-system configuration: the current vertex together with every
/// machine's state, taken *before* any machine has consumed the vertex.
pub type Config = (VertexId, Vec<usize>);

pub fn initial_config(game: &Game, machines: &MachineProfile) -> Config {
    (game.init, machines.iter().map(|m| m.initial).collect())
}

/// Advances a configuration by one step: the owner's machine picks the
/// move, every machine consumes the current vertex.
pub fn step_config(
    game: &Game,
    machines: &MachineProfile,
    config: &Config,
) -> Result<Config> {
    let (v, ref states) = *config;
    let owner = game.arena.owner(v);
    let next = machines[owner].next_move(states[owner], v)?;
    Ok(advance_config(machines, config, next))
}

/// The configuration after moving to `next` (any successor, not necessarily
/// the composed move) while all machines consume the current vertex.
pub fn advance_config(machines: &MachineProfile, config: &Config, next: VertexId) -> Config {
    let (v, ref states) = *config;
    let states = machines
        .iter()
        .zip(states)
        .map(|(m, &s)| m.advance(s, v))
        .collect();
    (next, states)
}

/// Runs the composed system from a configuration until it repeats,
/// returning the outcome as a lasso over game vertices.
pub fn composed_outcome_from(
    game: &Game,
    machines: &MachineProfile,
    from: Config,
) -> Result<Lasso> {
    let mut seen: HashMap<Config, usize> = HashMap::new();
    let mut trace: Vec<VertexId> = Vec::new();
    let mut cur = from;
    loop {
        if let Some(&k) = seen.get(&cur) {
            let cycle = trace.split_off(k);
            return Ok(Lasso::new(trace, cycle));
        }
        seen.insert(cur.clone(), trace.len());
        trace.push(cur.0);
        cur = step_config(game, machines, &cur)?;
    }
}

/// Outcome of the composed machines from the initial vertex.
pub fn composed_outcome(game: &Game, machines: &MachineProfile) -> Result<Lasso> {
    composed_outcome_from(game, machines, initial_config(game, machines))
}

/// Least cost player `i` can secure from `from` when every other player
/// follows their machine: breadth-first search over configurations where
/// `i` chooses freely at their vertices and the machines' moves are forced
/// elsewhere. `i`'s own machine state is carried along but never consulted.
pub fn best_response_from(
    game: &Game,
    machines: &MachineProfile,
    i: Player,
    from: Config,
) -> Result<Cost> {
    let mut seen: HashMap<Config, ()> = HashMap::new();
    let mut layer = vec![from];
    let mut depth: u64 = 0;
    while !layer.is_empty() {
        let mut next_layer = Vec::new();
        for config in layer {
            if seen.contains_key(&config) {
                continue;
            }
            let v = config.0;
            if game.arena.is_target(v, i) {
                return Ok(Cost::Finite(depth));
            }
            seen.insert(config.clone(), ());
            if game.arena.owner(v) == i {
                for &w in game.arena.succ(v) {
                    next_layer.push(advance_config(machines, &config, w));
                }
            } else {
                next_layer.push(step_config(game, machines, &config)?);
            }
        }
        layer = next_layer;
        depth += 1;
    }
    Ok(Cost::Infinite)
}

/// Best response of player `i` against the machines from the start of the
/// game.
pub fn best_response_cost(game: &Game, machines: &MachineProfile, i: Player) -> Result<Cost> {
    best_response_from(game, machines, i, initial_config(game, machines))
}

/// Independent equilibrium check: no player can improve on the composed
/// outcome by deviating against the fixed machines. Improvement is measured
/// in the game's own currency: a smaller cost in quantitative games, a
/// larger gain (a visit where the outcome had none) in qualitative games.
pub fn verify_ne(game: &Game, machines: &MachineProfile) -> Result<bool> {
    validate_profile(game, machines)?;
    let outcome = composed_outcome(game, machines)?;
    let profile = cost_or_gain_profile(game, &outcome);
    for i in 0..game.players() {
        let best = best_response_cost(game, machines, i)?;
        let improves = match game.mode {
            Mode::Quantitative => best < profile.0[i],
            Mode::Qualitative => best.gain() > profile.0[i].gain(),
        };
        if improves {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The costs each player pays in the composed outcome.
pub fn composed_profile(game: &Game, machines: &MachineProfile) -> Result<Profile> {
    Ok(cost_or_gain_profile(game, &composed_outcome(game, machines)?))
}

/// Serializes a machine profile into the documented line format.
pub fn serialize_machines(game: &Game, machines: &MachineProfile) -> String {
    let mut out = String::new();
    for m in machines {
        let _ = writeln!(
            out,
            "machine player={} initial={}",
            m.player + 1,
            m.state_names[m.initial]
        );
        for name in &m.state_names {
            let _ = writeln!(out, "state {name}");
        }
        for s in 0..m.n_states() {
            for v in 0..game.n_vertices() {
                let _ = writeln!(
                    out,
                    "update {} {} {}",
                    m.state_names[s],
                    game.arena.name(v),
                    m.state_names[m.update[s][v]]
                );
                if let Some(w) = m.moves[s][v] {
                    let _ = writeln!(
                        out,
                        "move {} {} {}",
                        m.state_names[s],
                        game.arena.name(v),
                        game.arena.name(w)
                    );
                }
            }
        }
        let _ = writeln!(out, "end");
    }
    out
}

struct MachineDraft {
    player: Player,
    initial_name: String,
    header_line: usize,
    state_names: Vec<String>,
    state_index: HashMap<String, usize>,
    update: Vec<(usize, VertexId, usize)>,
    moves: Vec<(usize, VertexId, VertexId)>,
}

/// Parses a machine-profile file; `file` names the source in errors.
pub fn parse_machines(game: &Game, text: &str, file: &str) -> Result<MachineProfile> {
    let syntax = |line: usize, msg: String| Error::Syntax {
        file: file.to_string(),
        line,
        msg,
    };
    let mut drafts: Vec<MachineDraft> = Vec::new();
    let mut open = false;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap();
        let rest: Vec<&str> = toks.collect();
        match head {
            "machine" => {
                if open {
                    return Err(syntax(lineno, "previous machine lacks `end`".to_string()));
                }
                let mut player = None;
                let mut initial = None;
                for kv in &rest {
                    match kv.split_once('=') {
                        Some(("player", p)) => {
                            let p: usize = p
                                .parse()
                                .map_err(|_| syntax(lineno, format!("bad player `{p}`")))?;
                            if p == 0 || p > game.players() {
                                return Err(Error::PlayerOutOfRange {
                                    player: p,
                                    players: game.players(),
                                });
                            }
                            player = Some(p - 1);
                        }
                        Some(("initial", s)) => initial = Some(s.to_string()),
                        _ => return Err(syntax(lineno, format!("unknown token `{kv}`"))),
                    }
                }
                let (Some(player), Some(initial_name)) = (player, initial) else {
                    return Err(syntax(
                        lineno,
                        "machine header needs player= and initial=".to_string(),
                    ));
                };
                drafts.push(MachineDraft {
                    player,
                    initial_name,
                    header_line: lineno,
                    state_names: Vec::new(),
                    state_index: HashMap::new(),
                    update: Vec::new(),
                    moves: Vec::new(),
                });
                open = true;
            }
            "state" => {
                let draft = drafts
                    .last_mut()
                    .filter(|_| open)
                    .ok_or_else(|| syntax(lineno, "`state` outside a machine".to_string()))?;
                let [name] = rest[..] else {
                    return Err(syntax(lineno, "usage: state <name>".to_string()));
                };
                if draft.state_index.contains_key(name) {
                    return Err(syntax(lineno, format!("duplicate state `{name}`")));
                }
                draft
                    .state_index
                    .insert(name.to_string(), draft.state_names.len());
                draft.state_names.push(name.to_string());
            }
            "update" | "move" => {
                let draft = drafts
                    .last_mut()
                    .filter(|_| open)
                    .ok_or_else(|| syntax(lineno, format!("`{head}` outside a machine")))?;
                let [state, vertex, target] = rest[..] else {
                    return Err(syntax(
                        lineno,
                        format!("usage: {head} <state> <vertex> <target>"),
                    ));
                };
                let s = *draft
                    .state_index
                    .get(state)
                    .ok_or_else(|| syntax(lineno, format!("unknown state `{state}`")))?;
                let v = game
                    .arena
                    .vertex_id(vertex)
                    .ok_or_else(|| Error::UnknownVertex(vertex.to_string()))?;
                if head == "update" {
                    let t = *draft
                        .state_index
                        .get(target)
                        .ok_or_else(|| syntax(lineno, format!("unknown state `{target}`")))?;
                    draft.update.push((s, v, t));
                } else {
                    let w = game
                        .arena
                        .vertex_id(target)
                        .ok_or_else(|| Error::UnknownVertex(target.to_string()))?;
                    draft.moves.push((s, v, w));
                }
            }
            "end" => {
                if !open {
                    return Err(syntax(lineno, "`end` without a machine".to_string()));
                }
                open = false;
            }
            other => return Err(syntax(lineno, format!("unknown directive `{other}`"))),
        }
    }
    if open {
        return Err(syntax(text.lines().count(), "missing `end`".to_string()));
    }

    let mut machines: Vec<Option<StrategyMachine>> = (0..game.players()).map(|_| None).collect();
    for draft in drafts {
        let n = game.n_vertices();
        let m = draft.state_names.len();
        let initial = *draft.state_index.get(&draft.initial_name).ok_or_else(|| {
            syntax(
                draft.header_line,
                format!("initial state `{}` not declared", draft.initial_name),
            )
        })?;
        let mut update = vec![vec![None; n]; m];
        for (s, v, t) in draft.update {
            update[s][v] = Some(t);
        }
        let mut update_total = vec![vec![0usize; n]; m];
        for s in 0..m {
            for v in 0..n {
                update_total[s][v] = update[s][v].ok_or_else(|| {
                    Error::InvalidMachine(format!(
                        "player {}: missing update at state `{}`, vertex {}",
                        draft.player + 1,
                        draft.state_names[s],
                        game.arena.name(v)
                    ))
                })?;
            }
        }
        let mut moves = vec![vec![None; n]; m];
        for (s, v, w) in draft.moves {
            moves[s][v] = Some(w);
        }
        let machine = StrategyMachine {
            player: draft.player,
            state_names: draft.state_names,
            initial,
            update: update_total,
            moves,
        };
        if machines[draft.player].is_some() {
            return Err(Error::InvalidMachine(format!(
                "two machines for player {}",
                draft.player + 1
            )));
        }
        machines[draft.player] = Some(machine);
    }
    let machines: MachineProfile = machines
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            m.ok_or_else(|| Error::InvalidMachine(format!("no machine for player {}", i + 1)))
        })
        .collect::<Result<_>>()?;
    validate_profile(game, &machines)?;
    Ok(machines)
}

/// DOT rendering of one machine: nodes are states, solid edges the update
/// function labeled by observed vertex, move annotations in brackets.
pub fn machine_to_dot(game: &Game, machine: &StrategyMachine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph machine_p{} {{", machine.player + 1);
    let _ = writeln!(out, "  rankdir=LR;");
    for (s, name) in machine.state_names.iter().enumerate() {
        let shape = if s == machine.initial {
            " peripheries=2"
        } else {
            ""
        };
        let _ = writeln!(out, "  s{s} [label=\"{name}\"{shape}];");
    }
    for s in 0..machine.n_states() {
        // Group observed vertices by (target state, move) to keep the graph
        // readable.
        let mut grouped: HashMap<(usize, Option<VertexId>), Vec<String>> = HashMap::new();
        for v in 0..game.n_vertices() {
            grouped
                .entry((machine.update[s][v], machine.moves[s][v]))
                .or_default()
                .push(game.arena.name(v).to_string());
        }
        let mut entries: Vec<_> = grouped.into_iter().collect();
        entries.sort_by(|a, b| a.1.cmp(&b.1));
        for ((t, mv), names) in entries {
            let label = match mv {
                Some(w) => format!("{} [-> {}]", names.join(","), game.arena.name(w)),
                None => names.join(","),
            };
            let _ = writeln!(out, "  s{s} -> s{t} [label=\"{label}\"];");
        }
    }
    let _ = writeln!(out, "}}");
    out
}
