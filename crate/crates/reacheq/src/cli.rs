//! Command-line front end.
//!
//! Subcommands: `solve` (decide a query and emit a verdict record), `check`
//! (test a play against a labeling), `values` (per-vertex coalition
//! values), `synth` (machines for an accepted play), `verify` (equilibrium
//! check of a machine file), `gen` (game generators).
//!
//! Exit codes: 0 = yes/success, 1 = no, 2 = usage or input error,
//! 3 = an internal limit was hit (fixpoint or size cap). Files are written
//! atomically (temp file + rename). Output records are `key value` lines.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::format::{game_to_dot, parse_game_named, parse_labeling, parse_lasso, Labeling};
use crate::game::{Game, Lasso, Mode, Profile};
use crate::lasso_ops::{lambda_consistent, Consistency};
use crate::machine::{
    composed_outcome, composed_profile, machine_to_dot, parse_machines, serialize_machines,
    verify_ne, MachineProfile,
};
use crate::ne::{decide_ne, parse_bounds, parse_cost_text, synthesize_ne_machines, Query, Verdict};
use crate::reductions::{
    qbf_to_game, random_game, sat_to_game, sat_to_pareto_game_qual, CnfFormula, QbfFormula,
};
use crate::spe::{analyze, build_witness, decide_spe, spe_consistency, synthesize_spe_machines,
    verify_spe};
use crate::values::val_labeling;

#[derive(Parser)]
#[command(
    name = "reacheq",
    version,
    about = "Equilibrium existence and strategy synthesis in multiplayer reachability games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an equilibrium meeting the requirement exists.
    Solve(SolveArgs),
    /// Check a play against an equilibrium-outcome characterization.
    Check(CheckArgs),
    /// Print per-vertex values of the characterization labeling.
    Values(ValuesArgs),
    /// Synthesize witness machines for an accepted play.
    Synth(SynthArgs),
    /// Verify that a machine profile is an equilibrium.
    Verify(VerifyArgs),
    /// Generate game files.
    Gen(GenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Solution {
    Ne,
    Spe,
}

impl Solution {
    fn name(self) -> &'static str {
        match self {
            Solution::Ne => "ne",
            Solution::Spe => "spe",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Problem {
    Threshold,
    Welfare,
    Pareto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Kv,
    Dot,
}

#[derive(Args)]
struct SolveArgs {
    /// Game file.
    #[arg(long)]
    game: PathBuf,
    /// Equilibrium notion to decide for.
    #[arg(long, value_enum, default_value = "ne")]
    solution: Solution,
    /// Requirement to decide.
    #[arg(long, value_enum)]
    problem: Problem,
    /// Per-player upper cost bounds: `6,3` (`inf` unbounded, suffix `<`
    /// strict, `-` no constraint).
    #[arg(long)]
    upper: Option<String>,
    /// Per-player lower cost bounds, same syntax as --upper.
    #[arg(long)]
    lower: Option<String>,
    /// Welfare: minimum number of players that must visit their targets.
    #[arg(long)]
    visitors: Option<usize>,
    /// Welfare: bound on the served players' total cost (`inf` allowed).
    #[arg(long)]
    total: Option<String>,
    /// Worker threads for the play sweep.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the witness machines to this file on a yes answer.
    #[arg(long)]
    machines_out: Option<PathBuf>,
    /// Write the witness machines as DOT to this file on a yes answer.
    #[arg(long)]
    emit_dot: Option<PathBuf>,
    /// Output format: `kv` records, or `dot` for the witness machines.
    #[arg(long, value_enum, default_value = "kv")]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    /// Game file.
    #[arg(long)]
    game: PathBuf,
    /// The play, as `prefix | cycle` vertex names.
    #[arg(long)]
    lasso: String,
    /// Labeling to check against: `val` (coalition values), `spe`
    /// (fixpoint labeling on the extension), or a labeling file path.
    #[arg(long, default_value = "val")]
    labeling: String,
}

#[derive(Args)]
struct ValuesArgs {
    /// Game file.
    #[arg(long)]
    game: PathBuf,
    /// `ne`: coalition values on the game. `spe`: fixpoint labeling on the
    /// visit-tracking extension.
    #[arg(long, value_enum, default_value = "ne")]
    solution: Solution,
    /// `kv` prints `name owner value` lines; `dot` prints the graph.
    #[arg(long, value_enum, default_value = "kv")]
    format: Format,
}

#[derive(Args)]
struct SynthArgs {
    /// Game file.
    #[arg(long)]
    game: PathBuf,
    /// Equilibrium notion to witness.
    #[arg(long, value_enum, default_value = "ne")]
    solution: Solution,
    /// The intended outcome, as `prefix | cycle` vertex names.
    #[arg(long)]
    lasso: String,
    /// Write the machine file here (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the machines as DOT to this file.
    #[arg(long)]
    emit_dot: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Game file.
    #[arg(long)]
    game: PathBuf,
    /// Equilibrium notion to verify.
    #[arg(long, value_enum, default_value = "ne")]
    solution: Solution,
    /// Machine file to verify.
    #[arg(long)]
    machines: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    what: GenCommand,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Threshold game from a DIMACS CNF: satisfiable iff an equilibrium
    /// meets the printed threshold.
    Sat {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the matching `threshold` record.
        #[arg(long)]
        print_threshold: bool,
    },
    /// Welfare game from a QDIMACS formula (alternating prefix):
    /// true iff a subgame-perfect equilibrium meets the printed welfare.
    Qbf {
        #[arg(long)]
        qbf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the matching `welfare` record.
        #[arg(long)]
        print_threshold: bool,
    },
    /// Qualitative Pareto game from a DIMACS CNF: satisfiable iff a
    /// Pareto-optimal equilibrium exists.
    ParetoQual {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random game (identical seed, identical game).
    Random {
        /// Bound on vertices after weighted-edge expansion.
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        players: usize,
        #[arg(long)]
        seed: u64,
        /// Generate a qualitative game (default quantitative).
        #[arg(long)]
        qualitative: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses the command line and runs it; returns the process exit code.
/// Usage errors are reported by the argument parser itself (exit 2).
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("reacheq: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Solve(a) => solve(a),
        Command::Check(a) => check(a),
        Command::Values(a) => values(a),
        Command::Synth(a) => synth(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a.what),
    }
}

fn load_game(path: &Path) -> Result<Game> {
    let text = std::fs::read_to_string(path)?;
    parse_game_named(&text, &path.display().to_string())
}

/// Writes via a temp file in the destination directory plus a rename, so a
/// crash can never leave a half-written file.
fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(content.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn build_query(game: &Game, a: &SolveArgs) -> Result<Query> {
    match a.problem {
        Problem::Threshold => {
            let n = game.players();
            let upper = match &a.upper {
                Some(s) => parse_bounds(s, n, "upper")?,
                None => vec![None; n],
            };
            let lower = match &a.lower {
                Some(s) => parse_bounds(s, n, "lower")?,
                None => vec![None; n],
            };
            Ok(Query::Threshold { upper, lower })
        }
        Problem::Welfare => {
            let visitors = a.visitors.ok_or_else(|| {
                Error::BadQuery("the welfare problem needs --visitors".to_string())
            })?;
            let total = match &a.total {
                Some(s) => parse_cost_text(s)?,
                None => Cost::Infinite,
            };
            Ok(Query::Welfare { visitors, total })
        }
        Problem::Pareto => Ok(Query::Pareto),
    }
}

fn problem_name(p: Problem) -> &'static str {
    match p {
        Problem::Threshold => "threshold",
        Problem::Welfare => "welfare",
        Problem::Pareto => "pareto",
    }
}

fn render_profile(game: &Game, profile: &Profile) -> String {
    profile.render(game.mode)
}

fn machines_text(game: &Game, machines: &MachineProfile) -> String {
    serialize_machines(game, machines)
}

fn machines_dot(game: &Game, machines: &MachineProfile) -> String {
    machines
        .iter()
        .map(|m| machine_to_dot(game, m))
        .collect::<Vec<_>>()
        .join("\n")
}

fn solve(a: SolveArgs) -> Result<i32> {
    let started = Instant::now();
    let game = load_game(&a.game)?;
    let query = build_query(&game, &a)?;
    let verdict: Verdict = match a.solution {
        Solution::Ne => decide_ne(&game, &query, a.jobs)?,
        Solution::Spe => decide_spe(&game, &query, a.jobs)?,
    };
    if let (true, Some(machines)) = (verdict.yes, &verdict.machines) {
        if let Some(path) = &a.machines_out {
            write_atomic(path, &machines_text(&game, machines))?;
        }
        if let Some(path) = &a.emit_dot {
            write_atomic(path, &machines_dot(&game, machines))?;
        }
        if a.format == Format::Dot {
            print!("{}", machines_dot(&game, machines));
            return Ok(0);
        }
    } else if a.format == Format::Dot {
        return Ok(1);
    }
    println!("answer {}", if verdict.yes { "yes" } else { "no" });
    println!("problem {}", problem_name(a.problem));
    println!("solution {}", a.solution.name());
    if let Some(lasso) = &verdict.lasso {
        println!("lasso {}", lasso.display(&game));
    }
    if let Some(profile) = &verdict.profile {
        println!("profile {}", render_profile(&game, profile));
    }
    if let Some(w) = &verdict.welfare {
        println!("welfare {},{}", w.visitors, w.total);
    }
    if let Some(front) = &verdict.front {
        for p in front {
            println!("front {}", render_profile(&game, p));
        }
    }
    if verdict.yes {
        if let Some(path) = &a.machines_out {
            println!("machines {}", path.display());
        }
    }
    println!("time_ms {}", started.elapsed().as_millis());
    Ok(if verdict.yes { 0 } else { 1 })
}

fn print_consistency(game: &Game, c: &Consistency) -> i32 {
    if c.consistent {
        println!("consistent yes");
        0
    } else {
        println!("consistent no");
        if let Some(v) = &c.violation {
            println!(
                "violation position={} vertex={} player={} residual={} bound={}",
                v.position,
                game.arena.name(v.vertex),
                v.player + 1,
                v.residual,
                v.bound
            );
        }
        1
    }
}

fn check(a: CheckArgs) -> Result<i32> {
    let game = load_game(&a.game)?;
    let lasso = parse_lasso(&game, &a.lasso)?;
    let consistency = match a.labeling.as_str() {
        "val" => {
            let labeling = val_labeling(&game)?;
            lambda_consistent(&game, &labeling, &lasso)?
        }
        "spe" => {
            let spe = analyze(&game)?;
            spe_consistency(&game, &spe, &lasso)?
        }
        path => {
            let text = std::fs::read_to_string(path)?;
            let labeling: Labeling = parse_labeling(&game, &text, path)?;
            lambda_consistent(&game, &labeling, &lasso)?
        }
    };
    Ok(print_consistency(&game, &consistency))
}

fn print_labeling(game: &Game, labeling: &Labeling) -> Result<()> {
    for v in 0..game.n_vertices() {
        println!(
            "{} {} {}",
            game.arena.name(v),
            game.arena.owner(v) + 1,
            labeling.get(game, v)?
        );
    }
    Ok(())
}

fn values(a: ValuesArgs) -> Result<i32> {
    let game = load_game(&a.game)?;
    match (a.solution, a.format) {
        (Solution::Ne, Format::Kv) => print_labeling(&game, &val_labeling(&game)?)?,
        (Solution::Ne, Format::Dot) => print!("{}", game_to_dot(&game)),
        (Solution::Spe, Format::Kv) => {
            let spe = analyze(&game)?;
            print_labeling(&spe.ext.game, &spe.lambda)?;
        }
        (Solution::Spe, Format::Dot) => {
            let spe = analyze(&game)?;
            print!("{}", game_to_dot(&spe.ext.game));
        }
    }
    Ok(0)
}

fn synth(a: SynthArgs) -> Result<i32> {
    let game = load_game(&a.game)?;
    let lasso: Lasso = parse_lasso(&game, &a.lasso)?;
    let machines = match a.solution {
        Solution::Ne => synthesize_ne_machines(&game, &lasso)?,
        Solution::Spe => {
            let spe = analyze(&game)?;
            let witness = build_witness(&game, &spe, &lasso)?;
            synthesize_spe_machines(&game, &spe, &witness)?
        }
    };
    let text = machines_text(&game, &machines);
    match &a.out {
        Some(path) => write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &a.emit_dot {
        write_atomic(path, &machines_dot(&game, &machines))?;
    }
    Ok(0)
}

fn verify(a: VerifyArgs) -> Result<i32> {
    let game = load_game(&a.game)?;
    let text = std::fs::read_to_string(&a.machines)?;
    let machines = parse_machines(&game, &text, &a.machines.display().to_string())?;
    let ok = match a.solution {
        Solution::Ne => verify_ne(&game, &machines)?,
        Solution::Spe => verify_spe(&game, &machines)?,
    };
    println!("equilibrium {}", if ok { "yes" } else { "no" });
    let outcome = composed_outcome(&game, &machines)?;
    println!("outcome {}", outcome.display(&game));
    println!(
        "profile {}",
        render_profile(&game, &composed_profile(&game, &machines)?)
    );
    Ok(if ok { 0 } else { 1 })
}

fn emit_game(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen(what: GenCommand) -> Result<i32> {
    match what {
        GenCommand::Sat {
            cnf,
            out,
            print_threshold,
        } => {
            let text = std::fs::read_to_string(&cnf)?;
            let formula = CnfFormula::parse_dimacs(&text, &cnf.display().to_string())?;
            let (generated, profile) = sat_to_game(&formula)?;
            emit_game(&generated.text, out.as_deref())?;
            if print_threshold {
                println!("threshold {}", render_profile(&generated.game, &profile));
            }
        }
        GenCommand::Qbf {
            qbf,
            out,
            print_threshold,
        } => {
            let text = std::fs::read_to_string(&qbf)?;
            let formula = QbfFormula::parse_qdimacs(&text, &qbf.display().to_string())?;
            let (generated, query) = qbf_to_game(&formula)?;
            emit_game(&generated.text, out.as_deref())?;
            if print_threshold {
                if let Query::Welfare { visitors, total } = query {
                    println!("welfare {visitors},{total}");
                }
            }
        }
        GenCommand::ParetoQual { cnf, out } => {
            let text = std::fs::read_to_string(&cnf)?;
            let formula = CnfFormula::parse_dimacs(&text, &cnf.display().to_string())?;
            let generated = sat_to_pareto_game_qual(&formula)?;
            emit_game(&generated.text, out.as_deref())?;
        }
        GenCommand::Random {
            vertices,
            players,
            seed,
            qualitative,
            out,
        } => {
            if vertices == 0 || players == 0 || players > 64 {
                return Err(Error::BadQuery(
                    "--vertices must be positive and --players in 1..=64".to_string(),
                ));
            }
            let mode = if qualitative {
                Mode::Qualitative
            } else {
                Mode::Quantitative
            };
            let generated = random_game(seed, vertices, players, mode);
            emit_game(&generated.text, out.as_deref())?;
        }
    }
    Ok(0)
}
