//! Equilibrium existence and strategy synthesis in multiplayer reachability
//! games played on finite graphs.
//!
//! A game is an arena whose vertices are partitioned among players; the
//! owner of the current vertex picks the next edge, and all players move a
//! shared token forever. Each player wants to reach their own target set:
//! in quantitative games they minimize the number of steps until the first
//! visit (infinite if they never reach it), in qualitative games they only
//! care whether they reach it at all.
//!
//! The crate decides whether Nash equilibria and subgame-perfect equilibria
//! exist subject to requirements on their outcomes — per-player cost
//! thresholds, social welfare bounds, Pareto optimality — and synthesizes
//! finite strategy machines witnessing them, together with independent
//! verification of the synthesized profiles. Everything is exact: no
//! sampling, no floating point.
//!
//! Entry points:
//! * [`format::parse_game`] reads the textual game format.
//! * [`values::coalitional`] solves the two-player coalitional games that
//!   anchor all equilibrium characterizations.
//! * [`ne`] decides constrained existence of Nash equilibria and builds
//!   witness strategy machines.
//! * [`spe`] does the same for subgame-perfect equilibria via the extended
//!   game of visited-player sets.
//! * [`reductions`] maps propositional formulas to games (hardness
//!   constructions used as cross-checks) and generates random instances.

pub mod cost;
pub mod error;
pub mod format;
pub mod game;
pub mod extended;
pub mod lasso_ops;
pub mod machine;
pub mod ne;
pub mod cli;
pub mod reductions;
mod resid;
pub mod spe;
pub mod values;

pub use cost::Cost;
pub use error::{Error, Result};
pub use game::{Arena, Game, Lasso, Mode, Player, PlayerSet, Profile, VertexId, Welfare};
