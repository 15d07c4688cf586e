//! C ABI for the reacheq equilibrium solver.
//!
//! Conventions:
//! - Handles (`ReacheqGame`, `ReacheqVerdict`) are opaque; every
//!   constructor has a matching `reacheq_*_free`, and freeing `NULL` is a
//!   no-op.
//! - Strings returned by the library are NUL-terminated UTF-8 owned by the
//!   caller; release them with `reacheq_string_free`.
//! - Functions report a `ReacheqStatus`. `REACHEQ_OK`/`REACHEQ_NO` carry a
//!   decision's answer; the error statuses match the CLI exit codes
//!   (2 = bad input, 3 = internal limit). After a failure,
//!   `reacheq_last_error` returns a message describing it (per thread).
//!
//! The generated header lives at `include/reacheq.h`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use reacheq::cost::Cost;
use reacheq::error::Error;
use reacheq::format::parse_game;
use reacheq::game::Game;
use reacheq::machine::{parse_machines, serialize_machines, verify_ne};
use reacheq::ne::{decide_ne, parse_bounds, parse_cost_text, Query, Verdict};
use reacheq::spe::{analyze, decide_spe, verify_spe};
use reacheq::values::val_labeling;

/// Result of a library call. Values 2 and 3 mirror the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReacheqStatus {
    /// Success; for decisions, the answer is yes.
    ReacheqOk = 0,
    /// The call succeeded and the answer is no.
    ReacheqNo = 1,
    /// Malformed input: game text, formula, bounds, machines.
    ReacheqErrInput = 2,
    /// An internal limit was hit (fixpoint rounds or search size).
    ReacheqErrLimit = 3,
    /// A required pointer argument was NULL.
    ReacheqErrNull = 4,
    /// A string argument was not valid UTF-8.
    ReacheqErrUtf8 = 5,
}

use ReacheqStatus as St;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error_text(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|cell| *cell.borrow_mut() = Some(c));
}

fn set_error(e: &Error) -> ReacheqStatus {
    set_error_text(&e.to_string());
    match e.exit_code() {
        3 => St::ReacheqErrLimit,
        _ => St::ReacheqErrInput,
    }
}

fn null_error(what: &str) -> ReacheqStatus {
    set_error_text(&format!("{what} must not be NULL"));
    St::ReacheqErrNull
}

/// # Safety
/// `p` must be NULL or a NUL-terminated string valid for reads.
unsafe fn utf8<'a>(p: *const c_char, what: &str) -> Result<&'a str, ReacheqStatus> {
    if p.is_null() {
        return Err(null_error(what));
    }
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        set_error_text(&format!("{what} is not valid UTF-8"));
        St::ReacheqErrUtf8
    })
}

fn to_c_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .unwrap_or_default()
        .into_raw()
}

/// A parsed game. Opaque.
pub struct ReacheqGame {
    game: Game,
}

/// A decision result with rendered witness artifacts. Opaque.
pub struct ReacheqVerdict {
    yes: bool,
    lasso: Option<String>,
    profile: Option<String>,
    welfare: Option<String>,
    front: Option<String>,
    machines: Option<String>,
}

fn render_verdict(game: &Game, v: Verdict) -> ReacheqVerdict {
    ReacheqVerdict {
        yes: v.yes,
        lasso: v.lasso.as_ref().map(|l| l.display(game).to_string()),
        profile: v.profile.as_ref().map(|p| p.render(game.mode)),
        welfare: v.welfare.map(|w| format!("{},{}", w.visitors, w.total)),
        front: v.front.map(|f| {
            f.iter()
                .map(|p| p.render(game.mode))
                .collect::<Vec<_>>()
                .join("\n")
        }),
        machines: v.machines.as_ref().map(|m| serialize_machines(game, m)),
    }
}

/// Parses game text into a handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn reacheq_game_parse(
    text: *const c_char,
    out: *mut *mut ReacheqGame,
) -> ReacheqStatus {
    if out.is_null() {
        return null_error("out");
    }
    unsafe { *out = ptr::null_mut() };
    let text = match unsafe { utf8(text, "text") } {
        Ok(t) => t,
        Err(st) => return st,
    };
    match parse_game(text) {
        Ok(game) => {
            unsafe { *out = Box::into_raw(Box::new(ReacheqGame { game })) };
            St::ReacheqOk
        }
        Err(e) => set_error(&e),
    }
}

/// Releases a game handle. NULL is a no-op.
///
/// # Safety
/// `game` must be NULL or a pointer from `reacheq_game_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn reacheq_game_free(game: *mut ReacheqGame) {
    if !game.is_null() {
        drop(unsafe { Box::from_raw(game) });
    }
}

/// Number of vertices after weighted-edge expansion; 0 on NULL.
///
/// # Safety
/// `game` must be NULL or a live game handle.
#[no_mangle]
pub unsafe extern "C" fn reacheq_game_vertices(game: *const ReacheqGame) -> usize {
    unsafe { game.as_ref() }.map_or(0, |g| g.game.n_vertices())
}

/// Number of players; 0 on NULL.
///
/// # Safety
/// `game` must be NULL or a live game handle.
#[no_mangle]
pub unsafe extern "C" fn reacheq_game_players(game: *const ReacheqGame) -> usize {
    unsafe { game.as_ref() }.map_or(0, |g| g.game.players())
}

unsafe fn solve_common(
    game: *const ReacheqGame,
    spe: c_int,
    query: Result<Query, ReacheqStatus>,
    out: *mut *mut ReacheqVerdict,
) -> ReacheqStatus {
    if out.is_null() {
        return null_error("out");
    }
    unsafe { *out = ptr::null_mut() };
    let Some(handle) = (unsafe { game.as_ref() }) else {
        return null_error("game");
    };
    let query = match query {
        Ok(q) => q,
        Err(st) => return st,
    };
    let decided = if spe != 0 {
        decide_spe(&handle.game, &query, 1)
    } else {
        decide_ne(&handle.game, &query, 1)
    };
    match decided {
        Ok(v) => {
            let rendered = render_verdict(&handle.game, v);
            unsafe { *out = Box::into_raw(Box::new(rendered)) };
            St::ReacheqOk
        }
        Err(e) => set_error(&e),
    }
}

/// Decides the threshold problem. `spe` 0 = Nash, nonzero = subgame-perfect.
/// `upper`/`lower` use the bound-list syntax (`6,3<,-,inf`); NULL means
/// unconstrained. The answer is read with `reacheq_verdict_yes`.
///
/// # Safety
/// `game` must be a live handle; `upper`/`lower` NULL or NUL-terminated;
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn reacheq_solve_threshold(
    game: *const ReacheqGame,
    spe: c_int,
    upper: *const c_char,
    lower: *const c_char,
    out: *mut *mut ReacheqVerdict,
) -> ReacheqStatus {
    let players = unsafe { game.as_ref() }.map(|g| g.game.players());
    let query = (|| {
        let Some(players) = players else {
            return Err(null_error("game"));
        };
        let parse = |p: *const c_char, which: &str| -> Result<_, ReacheqStatus> {
            if p.is_null() {
                return Ok(vec![None; players]);
            }
            let s = unsafe { utf8(p, which) }?;
            parse_bounds(s, players, which).map_err(|e| set_error(&e))
        };
        Ok(Query::Threshold {
            upper: parse(upper, "upper")?,
            lower: parse(lower, "lower")?,
        })
    })();
    unsafe { solve_common(game, spe, query, out) }
}

/// Decides the social-welfare problem: at least `visitors` players served,
/// or exactly that many with total served cost at most `total` (`"inf"` or
/// NULL for unbounded).
///
/// # Safety
/// As for `reacheq_solve_threshold`.
#[no_mangle]
pub unsafe extern "C" fn reacheq_solve_welfare(
    game: *const ReacheqGame,
    spe: c_int,
    visitors: usize,
    total: *const c_char,
    out: *mut *mut ReacheqVerdict,
) -> ReacheqStatus {
    let query = (|| {
        let total = if total.is_null() {
            Cost::Infinite
        } else {
            let s = unsafe { utf8(total, "total") }?;
            parse_cost_text(s).map_err(|e| set_error(&e))?
        };
        Ok(Query::Welfare { visitors, total })
    })();
    unsafe { solve_common(game, spe, query, out) }
}

/// Decides the Pareto-optimality problem.
///
/// # Safety
/// As for `reacheq_solve_threshold`.
#[no_mangle]
pub unsafe extern "C" fn reacheq_solve_pareto(
    game: *const ReacheqGame,
    spe: c_int,
    out: *mut *mut ReacheqVerdict,
) -> ReacheqStatus {
    unsafe { solve_common(game, spe, Ok(Query::Pareto), out) }
}

/// 1 when the decision answered yes, 0 otherwise (including NULL).
///
/// # Safety
/// `verdict` must be NULL or a live verdict handle.
#[no_mangle]
pub unsafe extern "C" fn reacheq_verdict_yes(verdict: *const ReacheqVerdict) -> c_int {
    unsafe { verdict.as_ref() }.is_some_and(|v| v.yes) as c_int
}

unsafe fn verdict_string(
    verdict: *const ReacheqVerdict,
    field: impl Fn(&ReacheqVerdict) -> Option<&String>,
) -> *mut c_char {
    match unsafe { verdict.as_ref() }.and_then(field) {
        Some(s) => to_c_string(s),
        None => ptr::null_mut(),
    }
}

/// Witness play as `prefix | cycle` text, or NULL. Caller frees.
///
/// # Safety
/// `verdict` must be NULL or a live verdict handle.
#[no_mangle]
pub unsafe extern "C" fn reacheq_verdict_lasso(verdict: *const ReacheqVerdict) -> *mut c_char {
    unsafe { verdict_string(verdict, |v| v.lasso.as_ref()) }
}

/// Witness cost (or gain) profile as comma-separated text, or NULL.
///
/// # Safety
/// `verdict` must be NULL or a live verdict handle.
#[no_mangle]
pub unsafe extern "C" fn reacheq_verdict_profile(verdict: *const ReacheqVerdict) -> *mut c_char {
    unsafe { verdict_string(verdict, |v| v.profile.as_ref()) }
}

/// Witness social welfare as `visitors,total`, or NULL.
///
/// # Safety
/// `verdict` must be NULL or a live verdict handle.
#[no_mangle]
pub unsafe extern "C" fn reacheq_verdict_welfare(verdict: *const ReacheqVerdict) -> *mut c_char {
    unsafe { verdict_string(verdict, |v| v.welfare.as_ref()) }
}

/// Pareto front, one profile per line, or NULL.
///
/// # Safety
/// `verdict` must be NULL or a live verdict handle.
#[no_mangle]
pub unsafe extern "C" fn reacheq_verdict_front(verdict: *const ReacheqVerdict) -> *mut c_char {
    unsafe { verdict_string(verdict, |v| v.front.as_ref()) }
}

/// Witness strategy machines in the machine file format, or NULL.
///
/// # Safety
/// `verdict` must be NULL or a live verdict handle.
#[no_mangle]
pub unsafe extern "C" fn reacheq_verdict_machines(verdict: *const ReacheqVerdict) -> *mut c_char {
    unsafe { verdict_string(verdict, |v| v.machines.as_ref()) }
}

/// Releases a verdict handle. NULL is a no-op.
///
/// # Safety
/// `verdict` must be NULL or a pointer from a solve call not yet freed.
#[no_mangle]
pub unsafe extern "C" fn reacheq_verdict_free(verdict: *mut ReacheqVerdict) {
    if !verdict.is_null() {
        drop(unsafe { Box::from_raw(verdict) });
    }
}

/// Checks a machine file against the game: `REACHEQ_OK` when the profile
/// is an equilibrium of the requested kind, `REACHEQ_NO` when it is not.
///
/// # Safety
/// `game` must be a live handle; `machines_text` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn reacheq_verify(
    game: *const ReacheqGame,
    spe: c_int,
    machines_text: *const c_char,
) -> ReacheqStatus {
    let Some(handle) = (unsafe { game.as_ref() }) else {
        return null_error("game");
    };
    let text = match unsafe { utf8(machines_text, "machines_text") } {
        Ok(t) => t,
        Err(st) => return st,
    };
    let run = || -> Result<bool, Error> {
        let machines = parse_machines(&handle.game, text, "<machines>")?;
        if spe != 0 {
            verify_spe(&handle.game, &machines)
        } else {
            verify_ne(&handle.game, &machines)
        }
    };
    match run() {
        Ok(true) => St::ReacheqOk,
        Ok(false) => St::ReacheqNo,
        Err(e) => set_error(&e),
    }
}

/// Writes the characterization labeling to `*out_text` as `name owner
/// value` lines: coalition values of the game (`spe` = 0) or the fixpoint
/// labeling of its visit-tracking extension (`spe` nonzero). Caller frees.
///
/// # Safety
/// `game` must be a live handle; `out_text` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn reacheq_values(
    game: *const ReacheqGame,
    spe: c_int,
    out_text: *mut *mut c_char,
) -> ReacheqStatus {
    if out_text.is_null() {
        return null_error("out_text");
    }
    unsafe { *out_text = ptr::null_mut() };
    let Some(handle) = (unsafe { game.as_ref() }) else {
        return null_error("game");
    };
    let run = || -> Result<String, Error> {
        let (game, labeling) = if spe != 0 {
            let spe = analyze(&handle.game)?;
            (spe.ext.game.clone(), spe.lambda)
        } else {
            (handle.game.clone(), val_labeling(&handle.game)?)
        };
        let mut text = String::new();
        for v in 0..game.n_vertices() {
            text.push_str(&format!(
                "{} {} {}\n",
                game.arena.name(v),
                game.arena.owner(v) + 1,
                labeling.get(&game, v)?
            ));
        }
        Ok(text)
    };
    match run() {
        Ok(text) => {
            unsafe { *out_text = to_c_string(&text) };
            St::ReacheqOk
        }
        Err(e) => set_error(&e),
    }
}

/// Releases a string returned by the library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn reacheq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message describing the calling thread's most recent failure, or NULL.
/// Caller frees.
#[no_mangle]
pub extern "C" fn reacheq_last_error() -> *mut c_char {
    LAST_ERROR.with(|cell| match &*cell.borrow() {
        Some(c) => to_c_string(&c.to_string_lossy()),
        None => ptr::null_mut(),
    })
}
