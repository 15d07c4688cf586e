//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Syntax error in a game, lasso, labeling, machine or formula file.
    #[error("{file}:{line}: {msg}")]
    Syntax {
        file: String,
        line: usize,
        msg: String,
    },

    /// A vertex name was referenced but never declared.
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    /// Every vertex must have at least one outgoing edge.
    #[error("vertex `{0}` has no outgoing edge")]
    NoSuccessor(String),

    #[error("owner {owner} out of range (game has {players} players)")]
    OwnerOutOfRange { owner: usize, players: usize },

    #[error("player {player} out of range (game has {players} players)")]
    PlayerOutOfRange { player: usize, players: usize },

    #[error("invalid lasso: {0}")]
    InvalidLasso(String),

    /// The labeling misses a vertex that a consistency check needs.
    #[error("labeling has no value for vertex `{0}`")]
    LabelingMissing(String),

    /// The positions handed to the cycle-removal rewrite do not delimit a
    /// removable cycle (different vertices, or new targets visited inside).
    #[error("positions {k} and {m} do not delimit a removable cycle: {reason}")]
    NotRemovableCycle { k: usize, m: usize, reason: String },

    /// A play was expected to start at the initial vertex of the game.
    #[error("lasso starts at `{found}`, expected initial vertex `{init}`")]
    NotFromInit { found: String, init: String },

    /// Strategy synthesis was asked for a play that fails the outcome
    /// characterization it must witness.
    #[error("lasso is not an equilibrium outcome: violation at position {position} (vertex `{vertex}`, player {player}: residual {residual} exceeds bound {bound})")]
    NotEquilibriumOutcome {
        position: usize,
        vertex: String,
        player: usize,
        residual: String,
        bound: String,
    },

    /// The family of punishment plays failed its mutual-domination check.
    #[error("witness is not valid: {0}")]
    WitnessNotGood(String),

    #[error("no consistent play exists from `{0}` within the search bound")]
    NoConsistentPlay(String),

    /// The labeling fixpoint did not stabilize within the configured number
    /// of rounds.
    #[error("labeling fixpoint did not stabilize within {0} rounds")]
    FixpointDiverged(usize),

    /// An internal search structure outgrew the configured cap.
    #[error("search exceeded the configured size cap ({0})")]
    SizeCap(usize),

    #[error("game is not strongly connected (vertex `{0}` cannot reach every other vertex)")]
    NotStronglyConnected(String),

    #[error("invalid machine file: {0}")]
    InvalidMachine(String),

    #[error("invalid query: {0}")]
    BadQuery(String),

    #[error("formula too large for exhaustive evaluation: {0}")]
    FormulaTooLarge(String),

    /// A structurally well-formed formula that the requested construction
    /// cannot accept (empty clause, variable out of range, empty formula).
    #[error("invalid formula: {0}")]
    InvalidFormula(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code mirrored by the command-line interface: 2 for bad
    /// input or usage, 3 for an internal limit.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::FixpointDiverged(_) | Error::SizeCap(_) | Error::NoConsistentPlay(_) => 3,
            _ => 2,
        }
    }
}
