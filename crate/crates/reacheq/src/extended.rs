//! The visit-tracking extension of a game.
//!
//! An extended vertex pairs a base vertex with the set of players whose
//! target sets the history has already visited. Moving along a base edge
//! adds the targets of the vertex being entered, so the second component
//! only ever grows. The extension is built as a plain [`Game`] over the
//! fragment reachable from the initial pairing, with the served set doubling
//! as the target memberships of the extended vertex: a player's target set
//! is visited at an extended vertex exactly when the player is already
//! served there. Every play rewrite, consistency check, and sweep in this
//! crate therefore applies to the extension unchanged, and plays from the
//! extended initial vertex correspond one-to-one to plays of the base game
//! with identical cost and gain profiles.
//!
//! Subgame-perfect reasoning happens here: what a player may still demand
//! depends on who has already been served, which the base game does not
//! record in its vertices.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::{Arena, Game, Lasso, PlayerSet, VertexId};
use crate::resid::PRODUCT_CAP;

/// A game together with its visit-tracking extension and the maps between
/// the two vertex spaces.
#[derive(Clone, Debug)]
pub struct Extended {
    /// The extension, a plain game over the reachable extended vertices.
    pub game: Game,
    /// Base vertex and served set of each extended vertex.
    pub base: Vec<(VertexId, PlayerSet)>,
    index: HashMap<(VertexId, PlayerSet), VertexId>,
}

impl Extended {
    /// Extended vertex for a base vertex and served set, when reachable.
    pub fn vertex(&self, v: VertexId, served: PlayerSet) -> Option<VertexId> {
        self.index.get(&(v, served)).copied()
    }

    pub fn base_vertex(&self, x: VertexId) -> VertexId {
        self.base[x].0
    }

    pub fn served(&self, x: VertexId) -> PlayerSet {
        self.base[x].1
    }
}

fn extended_name(game: &Game, v: VertexId, served: PlayerSet) -> String {
    let mut name = format!("{}@", game.arena.name(v));
    for (k, p) in served.iter().enumerate() {
        if k > 0 {
            name.push('.');
        }
        name.push_str(&(p + 1).to_string());
    }
    name
}

/// Builds the reachable visit-tracking extension of `game`.
pub fn build_extended(game: &Game) -> Result<Extended> {
    let start = (game.init, game.arena.targets_at(game.init));
    let mut order: Vec<(VertexId, PlayerSet)> = vec![start];
    let mut index: HashMap<(VertexId, PlayerSet), VertexId> = HashMap::new();
    index.insert(start, 0);
    let mut head = 0;
    while head < order.len() {
        let (v, served) = order[head];
        head += 1;
        for &w in game.arena.succ(v) {
            let key = (w, served.union(game.arena.targets_at(w)));
            if !index.contains_key(&key) {
                if order.len() >= PRODUCT_CAP {
                    return Err(Error::SizeCap(PRODUCT_CAP));
                }
                index.insert(key, order.len());
                order.push(key);
            }
        }
    }
    let vertices: Vec<(String, usize, PlayerSet)> = order
        .iter()
        .map(|&(v, served)| (extended_name(game, v, served), game.arena.owner(v), served))
        .collect();
    let mut edges = Vec::new();
    for (x, &(v, served)) in order.iter().enumerate() {
        for &w in game.arena.succ(v) {
            let key = (w, served.union(game.arena.targets_at(w)));
            edges.push((x, index[&key]));
        }
    }
    let arena = Arena::new(game.players(), vertices, &edges)?;
    Ok(Extended {
        game: Game {
            arena,
            mode: game.mode,
            init: 0,
        },
        base: order,
        index,
    })
}

/// Lifts a play of the base game (anchored at the initial vertex) into the
/// extension. The lift follows the play for one extra cycle traversal so the
/// served set can stabilize, then recloses; the result is canonical.
pub fn lift_lasso(ext: &Extended, game: &Game, lasso: &Lasso) -> Result<Lasso> {
    lasso.validate(game)?;
    if lasso.first_vertex() != game.init {
        return Err(Error::NotFromInit {
            found: game.arena.name(lasso.first_vertex()).to_string(),
            init: game.arena.name(game.init).to_string(),
        });
    }
    let p = lasso.prefix.len();
    let c = lasso.cycle.len();
    let mut served = PlayerSet::EMPTY;
    let mut states = Vec::with_capacity(p + 2 * c);
    for t in 0..p + 2 * c {
        let v = lasso.vertex_at(t);
        served = served.union(game.arena.targets_at(v));
        states.push(
            ext.vertex(v, served)
                .expect("plays from the initial vertex stay in the reachable extension"),
        );
    }
    let cycle = states.split_off(p + c);
    Ok(Lasso::new(states, cycle).canonicalize())
}

/// Projects a play of the extension back to the base game (canonical form).
pub fn project_lasso(ext: &Extended, lasso: &Lasso) -> Lasso {
    let prefix = lasso.prefix.iter().map(|&x| ext.base_vertex(x)).collect();
    let cycle = lasso.cycle.iter().map(|&x| ext.base_vertex(x)).collect();
    Lasso::new(prefix, cycle).canonicalize()
}
