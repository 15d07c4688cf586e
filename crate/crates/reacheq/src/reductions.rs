//! Formula-to-game generators and brute-force logic oracles.
//!
//! The generators build fixed game families whose equilibrium questions
//! encode Boolean satisfiability: [`sat_to_game`] turns a CNF into a
//! quantitative game where the formula is satisfiable exactly when some
//! equilibrium meets a cost threshold; [`sat_to_pareto_game_qual`] encodes
//! the same formula into a qualitative game whose equilibria can only be
//! Pareto-optimal when the formula is satisfiable; [`qbf_to_game`] encodes
//! a quantified formula into a welfare question about subgame-perfect
//! equilibria. [`brute_sat`] and [`brute_qbf`] are the independent oracles:
//! plain exhaustive evaluation, no game theory involved.
//!
//! [`random_game`] produces small seeded games for differential testing.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::format::parse_game;
use crate::game::{Game, Mode, Profile};
use crate::ne::{Bound, Query};

/// Exhaustive-valuation cap for [`brute_sat`].
pub const SAT_BRUTE_CAP: usize = 20;

/// Game-tree evaluation cap for [`brute_qbf`].
pub const QBF_BRUTE_CAP: usize = 12;

/// Conjunction of clauses over variables `1..=variables`; a literal is a
/// signed variable index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub variables: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    pub fn new(variables: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        for (j, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidFormula(format!("clause {} is empty", j + 1)));
            }
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > variables {
                    return Err(Error::InvalidFormula(format!(
                        "literal {lit} in clause {} is out of range (variables 1..={variables})",
                        j + 1
                    )));
                }
            }
        }
        Ok(CnfFormula { variables, clauses })
    }

    /// Parses DIMACS CNF: `c` comment lines, a `p cnf VARS CLAUSES` header,
    /// then zero-terminated clauses of signed literals.
    pub fn parse_dimacs(text: &str, file: &str) -> Result<Self> {
        let syntax = |line: usize, msg: String| Error::Syntax {
            file: file.to_string(),
            line,
            msg,
        };
        let mut header: Option<(usize, usize)> = None;
        let mut lits: Vec<(i64, usize)> = Vec::new();
        let mut last_line = 0;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            last_line = line;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('c') {
                continue;
            }
            if let Some(rest) = s.strip_prefix('p') {
                if header.is_some() {
                    return Err(syntax(line, "duplicate `p cnf` header".to_string()));
                }
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let parsed = match toks.as_slice() {
                    ["cnf", m, n] => m.parse::<usize>().ok().zip(n.parse::<usize>().ok()),
                    _ => None,
                };
                header = Some(parsed.ok_or_else(|| {
                    syntax(line, "expected header `p cnf VARS CLAUSES`".to_string())
                })?);
                continue;
            }
            if header.is_none() {
                return Err(syntax(line, "clause before `p cnf` header".to_string()));
            }
            for tok in s.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| syntax(line, format!("expected a literal, found `{tok}`")))?;
                lits.push((lit, line));
            }
        }
        let (m, n) =
            header.ok_or_else(|| syntax(last_line.max(1), "missing `p cnf` header".to_string()))?;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (lit, line) in lits {
            if lit == 0 {
                if current.is_empty() {
                    return Err(syntax(line, "empty clause".to_string()));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > m {
                    return Err(syntax(
                        line,
                        format!("literal {lit} out of range (header declares {m} variables)"),
                    ));
                }
                current.push(lit);
            }
        }
        if !current.is_empty() {
            return Err(syntax(last_line, "unterminated clause (missing 0)".to_string()));
        }
        if clauses.len() != n {
            return Err(syntax(
                last_line.max(1),
                format!("header declares {n} clauses, found {}", clauses.len()),
            ));
        }
        CnfFormula::new(m, clauses)
    }
}

fn eval_cnf(cnf: &CnfFormula, valuation: u64) -> bool {
    cnf.clauses.iter().all(|clause| {
        clause.iter().any(|&lit| {
            let bit = valuation >> (lit.unsigned_abs() - 1) & 1;
            (lit > 0) == (bit == 1)
        })
    })
}

/// Satisfiability by exhaustive valuation. The vacuous conjunction is true.
pub fn brute_sat(cnf: &CnfFormula) -> Result<bool> {
    if cnf.variables > SAT_BRUTE_CAP {
        return Err(Error::FormulaTooLarge(format!(
            "{} variables exceeds the exhaustive-valuation cap of {SAT_BRUTE_CAP}",
            cnf.variables
        )));
    }
    Ok((0..1u64 << cnf.variables).any(|val| eval_cnf(cnf, val)))
}

/// A fully quantified CNF with the fixed alternating prefix
/// `∃x1 ∀x2 ∃x3 …` (odd variables existential, even universal).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfFormula {
    pub matrix: CnfFormula,
}

impl QbfFormula {
    /// Parses QDIMACS: a DIMACS header, quantifier blocks `e VAR 0` /
    /// `a VAR 0` in strict single-variable alternation starting
    /// existential, then the clauses.
    pub fn parse_qdimacs(text: &str, file: &str) -> Result<Self> {
        let syntax = |line: usize, msg: String| Error::Syntax {
            file: file.to_string(),
            line,
            msg,
        };
        let mut stripped = String::new();
        let mut blocks: Vec<(char, Vec<usize>, usize)> = Vec::new();
        let mut seen_clause = false;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let s = raw.trim();
            let first = s.split_whitespace().next().unwrap_or("");
            if first == "e" || first == "a" {
                if seen_clause {
                    return Err(syntax(line, "quantifier block after clauses".to_string()));
                }
                let mut vars = Vec::new();
                let mut terminated = false;
                for tok in s.split_whitespace().skip(1) {
                    let v: i64 = tok.parse().map_err(|_| {
                        syntax(line, format!("expected a variable, found `{tok}`"))
                    })?;
                    if v == 0 {
                        terminated = true;
                        break;
                    }
                    if v < 0 {
                        return Err(syntax(line, "negative variable in prefix".to_string()));
                    }
                    vars.push(v as usize);
                }
                if !terminated {
                    return Err(syntax(line, "quantifier block missing final 0".to_string()));
                }
                blocks.push((first.chars().next().unwrap(), vars, line));
            } else {
                if !s.is_empty()
                    && !s.starts_with('c')
                    && !s.starts_with('p')
                    && header_done(&stripped)
                {
                    seen_clause = true;
                }
                stripped.push_str(raw);
                stripped.push('\n');
            }
        }
        let matrix = CnfFormula::parse_dimacs(&stripped, file)?;
        if blocks.len() != matrix.variables {
            let line = blocks.last().map_or(1, |b| b.2);
            return Err(syntax(
                line,
                format!(
                    "prefix quantifies {} variables, matrix has {}",
                    blocks.len(),
                    matrix.variables
                ),
            ));
        }
        for (k, (q, vars, line)) in blocks.iter().enumerate() {
            let expect = if k % 2 == 0 { 'e' } else { 'a' };
            if *q != expect || vars.len() != 1 || vars[0] != k + 1 {
                return Err(syntax(
                    *line,
                    "prefix must alternate exists/forall over x1..xm starting with exists"
                        .to_string(),
                ));
            }
        }
        Ok(QbfFormula { matrix })
    }
}

fn header_done(stripped: &str) -> bool {
    stripped
        .lines()
        .any(|l| l.trim_start().starts_with('p'))
}

/// Truth of the quantified formula by game-tree evaluation: odd variables
/// pick a value, even variables are conjunctive over both values.
pub fn brute_qbf(qbf: &QbfFormula) -> Result<bool> {
    let m = qbf.matrix.variables;
    if m > QBF_BRUTE_CAP {
        return Err(Error::FormulaTooLarge(format!(
            "{m} quantified variables exceeds the game-tree cap of {QBF_BRUTE_CAP}"
        )));
    }
    fn wins(cnf: &CnfFormula, k: usize, valuation: u64) -> bool {
        if k > cnf.variables {
            return eval_cnf(cnf, valuation);
        }
        let zero = wins(cnf, k + 1, valuation);
        let one = wins(cnf, k + 1, valuation | 1 << (k - 1));
        if k % 2 == 1 {
            zero || one
        } else {
            zero && one
        }
    }
    Ok(wins(&qbf.matrix, 1, 0))
}

/// A generated game together with its source text (for writing to disk).
#[derive(Debug)]
pub struct Generated {
    pub text: String,
    pub game: Game,
}

fn finish(text: String) -> Generated {
    let game = parse_game(&text).expect("generated game text is well-formed");
    Generated { text, game }
}

fn targets_attr(players: &[usize]) -> String {
    if players.is_empty() {
        String::new()
    } else {
        let list: Vec<String> = players.iter().map(ToString::to_string).collect();
        format!(" targets={}", list.join(","))
    }
}

fn check_nonempty(cnf: &CnfFormula) -> Result<()> {
    if cnf.clauses.is_empty() || cnf.variables == 0 {
        return Err(Error::InvalidFormula(
            "the game construction needs at least one clause over at least one variable"
                .to_string(),
        ));
    }
    Ok(())
}

/// Arena shared by both CNF encodings: a diamond per variable where the
/// spine owner picks `x{k}_0` or `x{k}_1`, then a path `P1..Pn` of clause
/// vertices where clause player `j` either continues or defects to the
/// `Tl` sink, ending in the `Tw` sink. Player `j` is served by the literal
/// vertices that make clause `j` true and by `Tl`; the spine player `n+1`
/// is served only by `Tw`.
fn cnf_arena(cnf: &CnfFormula, mode: &str, extra: &str) -> String {
    let m = cnf.variables;
    let n = cnf.clauses.len();
    let mut t = String::new();
    let _ = writeln!(t, "game {mode}");
    let _ = writeln!(t, "players {}", n + 1);
    for k in 1..=m {
        let zeros: Vec<usize> = (1..=n)
            .filter(|&j| cnf.clauses[j - 1].contains(&-(k as i64)))
            .collect();
        let ones: Vec<usize> = (1..=n)
            .filter(|&j| cnf.clauses[j - 1].contains(&(k as i64)))
            .collect();
        let _ = writeln!(t, "vertex x{k} owner={}", n + 1);
        let _ = writeln!(t, "vertex x{k}_0 owner={}{}", n + 1, targets_attr(&zeros));
        let _ = writeln!(t, "vertex x{k}_1 owner={}{}", n + 1, targets_attr(&ones));
    }
    for j in 1..=n {
        let _ = writeln!(t, "vertex P{j} owner={j}");
    }
    let _ = writeln!(t, "vertex Tw owner={} targets={}", n + 1, n + 1);
    let all: Vec<usize> = (1..=n).collect();
    let _ = writeln!(t, "vertex Tl owner={}{}", n + 1, targets_attr(&all));
    t.push_str(extra);
    for k in 1..=m {
        let next = if k < m {
            format!("x{}", k + 1)
        } else {
            "P1".to_string()
        };
        let _ = writeln!(t, "edge x{k} x{k}_0");
        let _ = writeln!(t, "edge x{k} x{k}_1");
        let _ = writeln!(t, "edge x{k}_0 {next}");
        let _ = writeln!(t, "edge x{k}_1 {next}");
    }
    for j in 1..=n {
        if j < n {
            let _ = writeln!(t, "edge P{j} P{}", j + 1);
        } else {
            let _ = writeln!(t, "edge P{j} Tw");
        }
        let _ = writeln!(t, "edge P{j} Tl");
    }
    let _ = writeln!(t, "edge Tw Tw");
    let _ = writeln!(t, "edge Tl Tl");
    t
}

/// Encodes satisfiability as a cost-threshold question: the formula is
/// satisfiable exactly when the returned quantitative game has an
/// equilibrium with cost at most `(2m, …, 2m, 2m+n)`. Any play cheap
/// enough for the spine player runs the whole diamond chain into `Tw`, and
/// every clause player cheap enough must have been served by a literal
/// vertex on the way — a satisfying valuation.
pub fn sat_to_game(cnf: &CnfFormula) -> Result<(Generated, Profile)> {
    check_nonempty(cnf)?;
    let m = cnf.variables as u64;
    let n = cnf.clauses.len();
    let mut t = cnf_arena(cnf, "quantitative", "");
    let _ = writeln!(t, "init x1");
    let profile = Profile(
        (0..n)
            .map(|_| Cost::Finite(2 * m))
            .chain(std::iter::once(Cost::Finite(2 * m + n as u64)))
            .collect(),
    );
    Ok((finish(t), profile))
}

/// Upper-threshold query matching a cost profile componentwise.
pub fn upper_threshold(profile: &Profile) -> Query {
    Query::Threshold {
        upper: profile.0.iter().map(|&c| Some(Bound::new(c))).collect(),
        lower: vec![None; profile.0.len()],
    }
}

/// Encodes satisfiability as a Pareto question on a qualitative game: the
/// same arena plus an escape sink `bot` off `x1` that serves only the
/// spine player. When the formula is unsatisfiable the only equilibrium
/// gain profile is the escape's `(0,…,0,1)`, which is dominated, so a
/// Pareto-optimal equilibrium exists exactly when the formula is
/// satisfiable.
pub fn sat_to_pareto_game_qual(cnf: &CnfFormula) -> Result<Generated> {
    check_nonempty(cnf)?;
    let n = cnf.clauses.len();
    let extra = format!("vertex bot owner={} targets={}\n", n + 1, n + 1);
    let mut t = cnf_arena(cnf, "qualitative", &extra);
    let _ = writeln!(t, "edge x1 bot");
    let _ = writeln!(t, "edge bot bot");
    let _ = writeln!(t, "init x1");
    Ok(finish(t))
}

/// Encodes truth of the quantified formula as a welfare question about
/// subgame-perfect equilibria. The arena walks a quantifier chain
/// `q1..qm` — odd `qk` owned by the existential player `n+1`, even by the
/// universal player `n+2` — choosing literal vertex `x{k}` or `nx{k}` at
/// each step, then a clause chain `c1..cn` where clause player `j` may
/// defect to sink `t{j}` (serving `j` and the universal player) instead of
/// continuing toward `t{n+1}` (serving the existential player). A long
/// escape from `q1` to a `bot` sink keeps the existential player from
/// preferring surrender. The formula is true exactly when a
/// subgame-perfect equilibrium reaches social welfare `(n+1, S)` with
/// `S = 2mn + 2m + n`.
pub fn qbf_to_game(qbf: &QbfFormula) -> Result<(Generated, Query)> {
    check_nonempty(&qbf.matrix)?;
    let cnf = &qbf.matrix;
    let m = cnf.variables;
    let n = cnf.clauses.len();
    let exist = n + 1;
    let univ = n + 2;
    let s = 2 * (m as u64) * (n as u64) + 2 * (m as u64) + n as u64;
    let mut t = String::new();
    let _ = writeln!(t, "game quantitative");
    let _ = writeln!(t, "players {univ}");
    for k in 1..=m {
        let owner = if k % 2 == 1 { exist } else { univ };
        let pos: Vec<usize> = (1..=n)
            .filter(|&j| cnf.clauses[j - 1].contains(&(k as i64)))
            .collect();
        let neg: Vec<usize> = (1..=n)
            .filter(|&j| cnf.clauses[j - 1].contains(&-(k as i64)))
            .collect();
        let _ = writeln!(t, "vertex q{k} owner={owner}");
        let _ = writeln!(t, "vertex x{k} owner={owner}{}", targets_attr(&pos));
        let _ = writeln!(t, "vertex nx{k} owner={owner}{}", targets_attr(&neg));
    }
    for j in 1..=n {
        let _ = writeln!(t, "vertex c{j} owner={j}");
    }
    for j in 1..=n {
        let _ = writeln!(t, "vertex t{j} owner={j} targets={j},{univ}");
    }
    let _ = writeln!(t, "vertex t{} owner={exist} targets={exist}", n + 1);
    let _ = writeln!(t, "vertex bot owner={exist} targets={exist}");
    for k in 1..=m {
        let next = if k < m {
            format!("q{}", k + 1)
        } else {
            "c1".to_string()
        };
        let _ = writeln!(t, "edge q{k} x{k}");
        let _ = writeln!(t, "edge q{k} nx{k}");
        let _ = writeln!(t, "edge x{k} {next}");
        let _ = writeln!(t, "edge nx{k} {next}");
    }
    for j in 1..=n {
        let _ = writeln!(t, "edge c{j} t{j}");
        if j < n {
            let _ = writeln!(t, "edge c{j} c{}", j + 1);
        } else {
            let _ = writeln!(t, "edge c{j} t{}", n + 1);
        }
    }
    for j in 1..=n + 1 {
        let _ = writeln!(t, "edge t{j} t{j}");
    }
    let _ = writeln!(t, "edge bot bot");
    let _ = writeln!(t, "edge q1 bot len={}", 2 * s);
    let _ = writeln!(t, "init q1");
    let query = Query::Welfare {
        visitors: n + 1,
        total: Cost::Finite(s),
    };
    Ok((finish(t), query))
}

/// Small seeded game for differential testing: `budget` bounds the number
/// of vertices after weighted-edge expansion. Structure, ownership,
/// targets and weights are drawn from a fixed-seed generator, so equal
/// seeds give identical games across runs and platforms.
pub fn random_game(seed: u64, budget: usize, players: usize, mode: Mode) -> Generated {
    assert!(budget >= 1 && players >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = if budget == 1 {
        1
    } else {
        rng.random_range(2..=budget)
    };
    let owners: Vec<usize> = (0..base).map(|_| rng.random_range(1..=players)).collect();
    let targets: Vec<Vec<usize>> = (0..base)
        .map(|_| (1..=players).filter(|_| rng.random_bool(0.25)).collect())
        .collect();
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    for v in 0..base {
        let degree = rng.random_range(1..=base.min(3));
        let mut picked: Vec<usize> = Vec::new();
        while picked.len() < degree {
            let w = rng.random_range(0..base);
            if !picked.contains(&w) {
                picked.push(w);
            }
        }
        picked.sort_unstable();
        for w in picked {
            edges.push((v, w, 1));
        }
    }
    if mode == Mode::Quantitative {
        let mut spare = budget - base;
        for _ in 0..8 {
            if spare == 0 || !rng.random_bool(0.5) {
                break;
            }
            let e = rng.random_range(0..edges.len());
            if edges[e].2 != 1 {
                continue;
            }
            let w = rng.random_range(2..=(spare + 1).min(4) as u64);
            edges[e].2 = w;
            spare -= w as usize - 1;
        }
    }
    let mut t = String::new();
    let _ = writeln!(
        t,
        "game {}",
        if mode == Mode::Quantitative {
            "quantitative"
        } else {
            "qualitative"
        }
    );
    let _ = writeln!(t, "players {players}");
    for v in 0..base {
        let _ = writeln!(t, "vertex v{v} owner={}{}", owners[v], targets_attr(&targets[v]));
    }
    for &(u, v, w) in &edges {
        if w == 1 {
            let _ = writeln!(t, "edge v{u} v{v}");
        } else {
            let _ = writeln!(t, "edge v{u} v{v} len={w}");
        }
    }
    let _ = writeln!(t, "init v0");
    finish(t)
}
