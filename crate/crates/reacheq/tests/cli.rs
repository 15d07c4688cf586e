//! End-to-end tests of the command-line interface: the exit-code contract
//! (0 yes, 1 no, 2 usage or input error, 3 internal limit), the key-value
//! records, file round trips, and the generators.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::QUANT_EX;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_reacheq")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is text")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is text")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Key-value records: value of the first line with the given key.
fn field(out: &Output, key: &str) -> Option<String> {
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} ")).map(str::to_string))
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
    game: String,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().expect("tempdir");
    let root = dir.path().to_path_buf();
    let game = root.join("ex1.game");
    std::fs::write(&game, QUANT_EX).expect("fixture written");
    Fixture {
        root,
        game: game.display().to_string(),
        _dir: dir,
    }
}

fn write(root: &Path, name: &str, text: &str) -> String {
    let path = root.join(name);
    std::fs::write(&path, text).expect("file written");
    path.display().to_string()
}

#[test]
fn threshold_yes_exits_zero_with_witness_fields() {
    let f = fixture();
    let out = run_in(
        &f.root,
        &[
            "solve",
            "--game",
            &f.game,
            "--solution",
            "ne",
            "--problem",
            "threshold",
            "--upper",
            "6,3",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(field(&out, "answer").as_deref(), Some("yes"));
    assert_eq!(field(&out, "problem").as_deref(), Some("threshold"));
    assert_eq!(field(&out, "solution").as_deref(), Some("ne"));
    assert_eq!(field(&out, "profile").as_deref(), Some("6,3"));
    assert_eq!(field(&out, "welfare").as_deref(), Some("2,9"));
    assert!(field(&out, "lasso").is_some(), "yes answers carry a witness");
    assert!(field(&out, "time_ms").is_some());
}

#[test]
fn threshold_no_exits_one_without_witness_fields() {
    let f = fixture();
    let out = run_in(
        &f.root,
        &[
            "solve", "--game", &f.game, "--problem", "threshold", "--upper", "3,3",
        ],
    );
    assert_eq!(code(&out), 1);
    assert_eq!(field(&out, "answer").as_deref(), Some("no"));
    assert!(field(&out, "lasso").is_none(), "no answers carry no witness");
    assert!(field(&out, "profile").is_none());
}

#[test]
fn strict_and_unconstrained_bound_syntax() {
    let f = fixture();
    // Strict uppers admitting (6,3): 7< means cost < 7.
    let out = run_in(
        &f.root,
        &[
            "solve", "--game", &f.game, "--problem", "threshold", "--upper", "7<,4<",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(field(&out, "profile").as_deref(), Some("6,3"));
    // `-` leaves a player unconstrained, `inf` is the infinite bound.
    let out = run_in(
        &f.root,
        &[
            "solve", "--game", &f.game, "--problem", "threshold", "--upper=-,3", "--lower=inf,-",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let profile = field(&out, "profile").expect("witness profile");
    assert!(
        profile.starts_with("inf,"),
        "lower bound inf forces an unserved player, got {profile}"
    );
}

#[test]
fn pareto_no_exits_one_and_reports_the_front() {
    let f = fixture();
    for solution in ["ne", "spe"] {
        let out = run_in(
            &f.root,
            &[
                "solve", "--game", &f.game, "--solution", solution, "--problem", "pareto",
            ],
        );
        assert_eq!(code(&out), 1, "{solution} stderr: {}", stderr(&out));
        assert_eq!(field(&out, "answer").as_deref(), Some("no"));
        let fronts: Vec<&str> = stdout(&out)
            .lines()
            .filter(|l| l.starts_with("front "))
            .map(|_| "")
            .collect();
        assert_eq!(fronts.len(), 2, "{solution} front size");
        assert!(stdout(&out).contains("front 2,6"));
        assert!(stdout(&out).contains("front 3,3"));
    }
}

#[test]
fn malformed_lasso_is_an_input_error() {
    let f = fixture();
    let out = run_in(
        &f.root,
        &[
            "check", "--game", &f.game, "--lasso", "v0 v2 v2_v4_1 v4 |",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("invalid lasso"), "stderr: {}", stderr(&out));
}

#[test]
fn check_prints_the_verdict_and_the_violation() {
    let f = fixture();
    let out = run_in(
        &f.root,
        &[
            "check", "--game", &f.game, "--lasso", "v0 v0_v1_1 v0_v1_2 v1 | v0 v2 v3",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "consistent yes");
    let out = run_in(
        &f.root,
        &["check", "--game", &f.game, "--lasso", "| v0 v2 v2_v4_1 v4"],
    );
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.starts_with("consistent no"));
    assert!(text.contains("vertex=v2"), "got: {text}");
    assert!(text.contains("residual=2"), "got: {text}");
    assert!(text.contains("bound=1"), "got: {text}");
}

#[test]
fn check_accepts_a_labeling_file() {
    let f = fixture();
    let labeling = write(
        &f.root,
        "vals.lab",
        "v0 3\nv1 inf\nv2 1\nv3 0\nv4 0\nv0_v1_1 2\nv0_v1_2 1\nv2_v4_1 1\n",
    );
    let out = run_in(
        &f.root,
        &[
            "check",
            "--game",
            &f.game,
            "--labeling",
            &labeling,
            "--lasso",
            "v0 v0_v1_1 v0_v1_2 v1 | v0 v2 v3",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "consistent yes");
}

#[test]
fn values_prints_one_line_per_vertex() {
    let f = fixture();
    let out = run_in(&f.root, &["values", "--game", &f.game]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 8, "one line per expanded vertex");
    for expected in ["v0 2 3", "v1 1 inf", "v2 1 1", "v3 1 0", "v4 1 0"] {
        assert!(text.lines().any(|l| l == expected), "missing `{expected}` in:\n{text}");
    }
    let out = run_in(&f.root, &["values", "--game", &f.game, "--format", "dot"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("digraph"));
}

#[test]
fn values_spe_works_on_the_extension() {
    let f = fixture();
    let out = run_in(&f.root, &["values", "--game", &f.game, "--solution", "spe"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(!text.is_empty());
    // Extended vertices append the served players to the base name.
    assert!(text.lines().next().unwrap().starts_with("v0@"));
    assert!(text.lines().count() > 8, "extension distinguishes served sets");
    let out = run_in(
        &f.root,
        &["values", "--game", &f.game, "--solution", "spe", "--format", "dot"],
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("digraph"));
}

#[test]
fn solve_writes_machines_that_verify() {
    let f = fixture();
    let machines = f.root.join("witness.machines");
    let dot = f.root.join("witness.dot");
    let out = run_in(
        &f.root,
        &[
            "solve",
            "--game",
            &f.game,
            "--problem",
            "threshold",
            "--upper",
            "6,3",
            "--machines-out",
            &machines.display().to_string(),
            "--emit-dot",
            &dot.display().to_string(),
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(
        field(&out, "machines").as_deref(),
        Some(machines.display().to_string().as_str())
    );
    assert!(machines.is_file());
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    let out = run_in(
        &f.root,
        &[
            "verify", "--game", &f.game, "--machines", &machines.display().to_string(),
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(field(&out, "equilibrium").as_deref(), Some("yes"));
    assert_eq!(field(&out, "profile").as_deref(), Some("6,3"));
    assert!(field(&out, "outcome").is_some());
}

#[test]
fn synth_round_trips_and_rejects_non_outcomes() {
    let f = fixture();
    let out_file = f.root.join("synth.machines");
    let out = run_in(
        &f.root,
        &[
            "synth",
            "--game",
            &f.game,
            "--lasso",
            "v0 v0_v1_1 v0_v1_2 v1 | v0 v2 v3",
            "--out",
            &out_file.display().to_string(),
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let out = run_in(
        &f.root,
        &[
            "verify", "--game", &f.game, "--machines", &out_file.display().to_string(),
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(field(&out, "equilibrium").as_deref(), Some("yes"));
    assert_eq!(field(&out, "profile").as_deref(), Some("6,3"));
    // A play failing the outcome characterization cannot be witnessed.
    let out = run_in(
        &f.root,
        &[
            "synth", "--game", &f.game, "--lasso", "| v0 v2 v2_v4_1 v4",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("not an equilibrium outcome"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn subgame_perfect_solve_and_verify_round_trip() {
    let f = fixture();
    let machines = f.root.join("spe.machines");
    let out = run_in(
        &f.root,
        &[
            "solve",
            "--game",
            &f.game,
            "--solution",
            "spe",
            "--problem",
            "threshold",
            "--machines-out",
            &machines.display().to_string(),
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(field(&out, "solution").as_deref(), Some("spe"));
    let out = run_in(
        &f.root,
        &[
            "verify",
            "--game",
            &f.game,
            "--solution",
            "spe",
            "--machines",
            &machines.display().to_string(),
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(field(&out, "equilibrium").as_deref(), Some("yes"));
}

#[test]
fn dot_format_prints_machines_only_on_yes() {
    let f = fixture();
    let out = run_in(
        &f.root,
        &[
            "solve", "--game", &f.game, "--problem", "threshold", "--upper", "6,3",
            "--format", "dot",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("digraph"));
    let out = run_in(
        &f.root,
        &[
            "solve", "--game", &f.game, "--problem", "pareto", "--format", "dot",
        ],
    );
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).is_empty());
}

#[test]
fn generated_sat_games_decide_satisfiability() {
    let f = fixture();
    let sat = write(&f.root, "sat.cnf", "p cnf 1 1\n1 0\n");
    let unsat = write(&f.root, "unsat.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    for (cnf, threshold, expect) in [(&sat, "2,3", 0), (&unsat, "4,5", 1)] {
        let game = f.root.join("cnf.game");
        let out = run_in(
            &f.root,
            &[
                "gen", "sat", "--cnf", cnf, "--out", &game.display().to_string(),
                "--print-threshold",
            ],
        );
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
        assert_eq!(field(&out, "threshold").as_deref(), Some(threshold));
        let out = run_in(
            &f.root,
            &[
                "solve", "--game", &game.display().to_string(), "--problem", "threshold",
                "--upper", threshold,
            ],
        );
        assert_eq!(code(&out), expect, "sat game for {cnf}");
    }
}

#[test]
fn generated_qbf_games_decide_truth() {
    let f = fixture();
    // ∃x1∀x2 (x1 ∨ x2) is true; ∃x1∀x2 (x1)(x2) is false.
    let qtrue = write(&f.root, "true.qdimacs", "p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n");
    let qfalse = write(&f.root, "false.qdimacs", "p cnf 2 2\ne 1 0\na 2 0\n1 0\n2 0\n");
    for (qbf, welfare, visitors, total, expect) in
        [(&qtrue, "3,8", "3", "8", 0), (&qfalse, "3,14", "3", "14", 1)]
    {
        let game = f.root.join("qbf.game");
        let out = run_in(
            &f.root,
            &[
                "gen", "qbf", "--qbf", qbf, "--out", &game.display().to_string(),
                "--print-threshold",
            ],
        );
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
        assert_eq!(field(&out, "welfare").as_deref(), Some(welfare));
        let out = run_in(
            &f.root,
            &[
                "solve", "--game", &game.display().to_string(), "--solution", "spe",
                "--problem", "welfare", "--visitors", visitors, "--total", total,
            ],
        );
        assert_eq!(code(&out), expect, "qbf game for {qbf}: {}", stderr(&out));
    }
}

#[test]
fn generated_pareto_games_decide_satisfiability() {
    let f = fixture();
    let sat = write(&f.root, "sat.cnf", "p cnf 1 1\n1 0\n");
    let unsat = write(&f.root, "unsat.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    for (cnf, expect) in [(&sat, 0), (&unsat, 1)] {
        let game = f.root.join("pareto.game");
        let out = run_in(
            &f.root,
            &[
                "gen", "pareto-qual", "--cnf", cnf, "--out", &game.display().to_string(),
            ],
        );
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
        let out = run_in(
            &f.root,
            &[
                "solve", "--game", &game.display().to_string(), "--problem", "pareto",
            ],
        );
        assert_eq!(code(&out), expect, "pareto game for {cnf}");
    }
}

#[test]
fn random_generation_is_deterministic() {
    let f = fixture();
    let a = f.root.join("a.game");
    let b = f.root.join("b.game");
    for out_file in [&a, &b] {
        let out = run_in(
            &f.root,
            &[
                "gen", "random", "--vertices", "8", "--players", "2", "--seed", "11",
                "--out", &out_file.display().to_string(),
            ],
        );
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    }
    let ta = std::fs::read_to_string(&a).unwrap();
    let tb = std::fs::read_to_string(&b).unwrap();
    assert_eq!(ta, tb, "same seed, same game");
    let out = run_in(&f.root, &["values", "--game", &a.display().to_string()]);
    assert_eq!(code(&out), 0, "generated game loads: {}", stderr(&out));
    let out = run_in(
        &f.root,
        &[
            "gen", "random", "--vertices", "8", "--players", "2", "--seed", "12",
            "--out", &b.display().to_string(),
        ],
    );
    assert_eq!(code(&out), 0);
    assert_ne!(ta, std::fs::read_to_string(&b).unwrap(), "different seed");
    let out = run_in(
        &f.root,
        &["gen", "random", "--vertices", "8", "--players", "0"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn internal_limits_exit_three() {
    let f = fixture();
    // The visit-tracking extension of this star is larger than the
    // documented product cap: 18 independently collectable targets.
    let mut text = String::from("game qualitative\nplayers 18\nvertex h owner=1\n");
    for i in 1..=18 {
        text.push_str(&format!("vertex t{i} owner=1 targets={i}\n"));
    }
    for i in 1..=18 {
        text.push_str(&format!("edge h t{i}\nedge t{i} h\n"));
    }
    text.push_str("init h\n");
    let star = write(&f.root, "star.game", &text);
    let out = run_in(&f.root, &["values", "--game", &star, "--solution", "spe"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("size cap"), "stderr: {}", stderr(&out));
}

#[test]
fn usage_and_input_errors_exit_two() {
    let f = fixture();
    let cases: Vec<Vec<&str>> = vec![
        vec![],
        vec!["solve", "--game", &f.game, "--problem", "tresh"],
        vec!["solve", "--game", &f.game, "--problem", "threshold", "--upper", "6"],
        vec!["solve", "--game", &f.game, "--problem", "welfare"],
        vec!["solve", "--game", "missing.game", "--problem", "pareto"],
        vec!["check", "--game", &f.game, "--lasso", "| v0 nowhere"],
    ];
    for args in cases {
        let out = run_in(&f.root, &args);
        assert_eq!(code(&out), 2, "args {args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty(), "args {args:?} explain the error");
    }
}

#[test]
fn output_is_deterministic_across_runs_and_jobs() {
    let f = fixture();
    let strip = |out: &Output| -> String {
        stdout(out)
            .lines()
            .filter(|l| !l.starts_with("time_ms "))
            .collect::<Vec<_>>()
            .join("\n")
    };
    for problem in [
        vec!["--problem", "threshold", "--upper", "6,3"],
        vec!["--problem", "pareto"],
        vec!["--problem", "welfare", "--visitors", "2", "--total", "9"],
    ] {
        let mut base = vec!["solve", "--game", &f.game];
        base.extend_from_slice(&problem);
        let first = run_in(&f.root, &base);
        let second = run_in(&f.root, &base);
        assert_eq!(strip(&first), strip(&second), "reruns agree for {problem:?}");
        let mut jobs = base.clone();
        jobs.extend_from_slice(&["--jobs", "3"]);
        let parallel = run_in(&f.root, &jobs);
        assert_eq!(
            strip(&first),
            strip(&parallel),
            "parallel sweep agrees for {problem:?}"
        );
    }
}
