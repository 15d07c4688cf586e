//! Text formats: game files, lasso strings, labeling files, DOT export.
//!
//! Game files are line oriented:
//!
//! ```text
//! # comment
//! game quantitative            # or qualitative
//! players 2
//! vertex v0 owner=2            # owners are 1-based
//! vertex v1 owner=1 targets=2  # v1 belongs to player 2's target set
//! edge v0 v1 len=3             # expands into a chain of fresh vertices
//! edge v1 v0
//! init v0
//! ```
//!
//! An edge with `len=k` (k >= 2) is expanded into `k-1` fresh deterministic
//! vertices named `<src>_<dst>_<i>`, owned by the owner of `src` and in no
//! target set, so that the weighted game and its expansion have the same
//! plays up to timing.
//!
//! Lassoes are written `prefix | cycle` with whitespace-separated vertex
//! names; a play that is a pure cycle may be written with a trailing pipe,
//! e.g. `v0 v2 v4 |`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::game::{Arena, Game, Lasso, Mode, Player, PlayerSet, VertexId};

/// A value per vertex, used for consistency checks. Entries may be missing
/// when the labeling was read from a file; computed labelings are total.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Labeling(pub Vec<Option<Cost>>);

impl Labeling {
    pub fn total(values: Vec<Cost>) -> Labeling {
        Labeling(values.into_iter().map(Some).collect())
    }

    pub fn get(&self, game: &Game, v: VertexId) -> Result<Cost> {
        self.0[v].ok_or_else(|| Error::LabelingMissing(game.arena.name(v).to_string()))
    }
}

fn syntax(file: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        file: file.to_string(),
        line,
        msg: msg.into(),
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains(['=', '|', '#']) && !name.contains(char::is_whitespace)
}

/// Parses a game file. See the module documentation for the grammar.
pub fn parse_game(text: &str) -> Result<Game> {
    parse_game_named(text, "<game>")
}

/// Like [`parse_game`], reporting `file` in error messages.
pub fn parse_game_named(text: &str, file: &str) -> Result<Game> {
    let mut mode: Option<Mode> = None;
    let mut players: Option<usize> = None;
    let mut vertices: Vec<(String, Player, PlayerSet)> = Vec::new();
    let mut index: HashMap<String, VertexId> = HashMap::new();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut chain_counter: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    let mut init: Option<VertexId> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "game" => {
                if mode.is_some() {
                    return Err(syntax(file, lineno, "duplicate `game` line"));
                }
                mode = Some(match tokens.get(1) {
                    Some(&"quantitative") => Mode::Quantitative,
                    Some(&"qualitative") => Mode::Qualitative,
                    _ => {
                        return Err(syntax(
                            file,
                            lineno,
                            "expected `game quantitative` or `game qualitative`",
                        ))
                    }
                });
            }
            "players" => {
                if players.is_some() {
                    return Err(syntax(file, lineno, "duplicate `players` line"));
                }
                let n: usize = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(file, lineno, "expected `players <n>`"))?;
                if n == 0 || n > 64 {
                    return Err(syntax(file, lineno, "player count must be in 1..=64"));
                }
                players = Some(n);
            }
            "vertex" => {
                let n = players
                    .ok_or_else(|| syntax(file, lineno, "`players` must come before `vertex`"))?;
                let name = *tokens
                    .get(1)
                    .ok_or_else(|| syntax(file, lineno, "expected `vertex <name> owner=<i>`"))?;
                if !valid_name(name) {
                    return Err(syntax(file, lineno, format!("invalid vertex name `{name}`")));
                }
                let mut owner: Option<usize> = None;
                let mut targets = PlayerSet::EMPTY;
                for tok in &tokens[2..] {
                    if let Some(o) = tok.strip_prefix("owner=") {
                        let o: usize = o
                            .parse()
                            .map_err(|_| syntax(file, lineno, "owner must be a player number"))?;
                        if o == 0 || o > n {
                            return Err(Error::OwnerOutOfRange {
                                owner: o,
                                players: n,
                            });
                        }
                        owner = Some(o - 1);
                    } else if let Some(list) = tok.strip_prefix("targets=") {
                        for part in list.split(',') {
                            let p: usize = part.parse().map_err(|_| {
                                syntax(file, lineno, format!("invalid target player `{part}`"))
                            })?;
                            if p == 0 || p > n {
                                return Err(Error::PlayerOutOfRange {
                                    player: p,
                                    players: n,
                                });
                            }
                            targets.insert(p - 1);
                        }
                    } else {
                        return Err(syntax(file, lineno, format!("unexpected token `{tok}`")));
                    }
                }
                let owner =
                    owner.ok_or_else(|| syntax(file, lineno, "vertex is missing `owner=`"))?;
                if index.contains_key(name) {
                    return Err(syntax(file, lineno, format!("duplicate vertex `{name}`")));
                }
                index.insert(name.to_string(), vertices.len());
                vertices.push((name.to_string(), owner, targets));
            }
            "edge" => {
                let src = tokens
                    .get(1)
                    .ok_or_else(|| syntax(file, lineno, "expected `edge <src> <dst>`"))?;
                let dst = tokens
                    .get(2)
                    .ok_or_else(|| syntax(file, lineno, "expected `edge <src> <dst>`"))?;
                let mut len: u64 = 1;
                for tok in &tokens[3..] {
                    if let Some(l) = tok.strip_prefix("len=") {
                        len = l
                            .parse()
                            .map_err(|_| syntax(file, lineno, "len must be a number"))?;
                        if len == 0 {
                            return Err(syntax(file, lineno, "len must be at least 1"));
                        }
                    } else {
                        return Err(syntax(file, lineno, format!("unexpected token `{tok}`")));
                    }
                }
                let u = *index
                    .get(*src)
                    .ok_or_else(|| Error::UnknownVertex(src.to_string()))?;
                let w = *index
                    .get(*dst)
                    .ok_or_else(|| Error::UnknownVertex(dst.to_string()))?;
                if len == 1 {
                    edges.push((u, w));
                } else {
                    // Expand into a chain of fresh vertices owned by the
                    // owner of the source.
                    let counter = chain_counter.entry((u, w)).or_insert(0);
                    let owner = vertices[u].1;
                    let mut prev = u;
                    for _ in 1..len {
                        *counter += 1;
                        let name = format!("{src}_{dst}_{counter}");
                        if index.contains_key(&name) {
                            return Err(syntax(
                                file,
                                lineno,
                                format!("expanded vertex name `{name}` collides with a declared vertex"),
                            ));
                        }
                        let id = vertices.len();
                        index.insert(name.clone(), id);
                        vertices.push((name, owner, PlayerSet::EMPTY));
                        edges.push((prev, id));
                        prev = id;
                    }
                    edges.push((prev, w));
                }
            }
            "init" => {
                if init.is_some() {
                    return Err(syntax(file, lineno, "duplicate `init` line"));
                }
                let name = tokens
                    .get(1)
                    .ok_or_else(|| syntax(file, lineno, "expected `init <name>`"))?;
                init = Some(
                    *index
                        .get(*name)
                        .ok_or_else(|| Error::UnknownVertex(name.to_string()))?,
                );
            }
            other => {
                return Err(syntax(file, lineno, format!("unknown directive `{other}`")));
            }
        }
    }

    let mode = mode.ok_or_else(|| syntax(file, 0, "missing `game` line"))?;
    let players = players.ok_or_else(|| syntax(file, 0, "missing `players` line"))?;
    let init = init.ok_or_else(|| syntax(file, 0, "missing `init` line"))?;
    let arena = Arena::new(players, vertices, &edges)?;
    Ok(Game { arena, mode, init })
}

/// Serializes a game in the file grammar. Chains are already expanded, so
/// every edge is written with implicit `len=1`; parsing the result yields a
/// structurally equal game.
pub fn serialize_game(game: &Game) -> String {
    let mut out = String::new();
    let mode = match game.mode {
        Mode::Quantitative => "quantitative",
        Mode::Qualitative => "qualitative",
    };
    let _ = writeln!(out, "game {mode}");
    let _ = writeln!(out, "players {}", game.players());
    for v in 0..game.n_vertices() {
        let targets = game.arena.targets_at(v);
        let _ = write!(
            out,
            "vertex {} owner={}",
            game.arena.name(v),
            game.arena.owner(v) + 1
        );
        if !targets.is_empty() {
            let list: Vec<String> = targets.iter().map(|p| (p + 1).to_string()).collect();
            let _ = write!(out, " targets={}", list.join(","));
        }
        out.push('\n');
    }
    for v in 0..game.n_vertices() {
        for &w in game.arena.succ(v) {
            let _ = writeln!(out, "edge {} {}", game.arena.name(v), game.arena.name(w));
        }
    }
    let _ = writeln!(out, "init {}", game.arena.name(game.init));
    out
}

/// Parses a lasso string (`prefix | cycle`; the prefix may be empty, the
/// cycle may not) and validates it against the game.
pub fn parse_lasso(game: &Game, text: &str) -> Result<Lasso> {
    let mut parts = text.splitn(2, '|');
    let left = parts.next().unwrap_or("");
    let right = parts
        .next()
        .ok_or_else(|| Error::InvalidLasso("missing `|` separator".to_string()))?;
    let resolve = |toks: &str| -> Result<Vec<VertexId>> {
        toks.split_whitespace()
            .map(|t| {
                game.arena
                    .vertex_id(t)
                    .ok_or_else(|| Error::UnknownVertex(t.to_string()))
            })
            .collect()
    };
    let left = resolve(left)?;
    let right = resolve(right)?;
    if right.is_empty() {
        return Err(Error::InvalidLasso("empty cycle".to_string()));
    }
    let lasso = Lasso::new(left, right);
    lasso.validate(game)?;
    Ok(lasso)
}

/// Parses a labeling file: one `vertex value` pair per line, where the value
/// is a number or `inf`. Vertices of the game that do not appear stay
/// unlabeled and only fault when a check needs them.
pub fn parse_labeling(game: &Game, text: &str, file: &str) -> Result<Labeling> {
    let mut values = vec![None; game.n_vertices()];
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let name = it.next().unwrap();
        let value = it
            .next()
            .ok_or_else(|| syntax(file, lineno, "expected `<vertex> <value>`"))?;
        if it.next().is_some() {
            return Err(syntax(file, lineno, "trailing tokens after value"));
        }
        let v = game
            .arena
            .vertex_id(name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))?;
        let cost: Cost = value.parse().map_err(|e: String| syntax(file, lineno, e))?;
        values[v] = Some(cost);
    }
    Ok(Labeling(values))
}

/// Renders the game as a DOT graph: one node shape per player, target
/// memberships in the label, doubled border on the initial vertex.
pub fn game_to_dot(game: &Game) -> String {
    const SHAPES: [&str; 7] = [
        "circle", "box", "diamond", "ellipse", "hexagon", "septagon", "octagon",
    ];
    let mut out = String::from("digraph game {\n");
    let mode = match game.mode {
        Mode::Quantitative => "quantitative",
        Mode::Qualitative => "qualitative",
    };
    let _ = writeln!(out, "  label=\"{mode}\";");
    for v in 0..game.n_vertices() {
        let shape = SHAPES[game.arena.owner(v) % SHAPES.len()];
        let targets = game.arena.targets_at(v);
        let mut label = game.arena.name(v).to_string();
        if !targets.is_empty() {
            let _ = write!(label, "\\nF{targets}");
        }
        let peripheries = if v == game.init { 2 } else { 1 };
        let _ = writeln!(
            out,
            "  \"{}\" [shape={shape}, peripheries={peripheries}, label=\"{label}\"];",
            game.arena.name(v)
        );
    }
    for v in 0..game.n_vertices() {
        for &w in game.arena.succ(v) {
            let _ = writeln!(out, "  \"{}\" -> \"{}\";", game.arena.name(v), game.arena.name(w));
        }
    }
    out.push_str("}\n");
    out
}
