//! C interface to `folim`.
//!
//! Every function returns a [`FolimStatus`]. On failure a message is kept per
//! thread and can be read with [`folim_last_error`]. Objects are opaque
//! handles created by `*_new`/`*_parse` style functions and released with the
//! matching `*_free`. Strings returned through out-pointers are owned by the
//! caller and released with [`folim_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use folim::efgame::{solve, GameSide, Winner};
use folim::eval::{stone_pairing_exact, stone_pairing_mc, SamplingOptions};
use folim::strategy::{init_state, StrategyState};
use folim::{generate_hn, parse_formula, Formula, Graph, Limits};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FolimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Graph = 4,
    Eval = 5,
    CapExceeded = 6,
    Game = 7,
    Precondition = 8,
    Strategy = 9,
    InvalidArgument = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FolimSide {
    Left = 0,
    Right = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FolimWinner {
    Spoiler = 0,
    Duplicator = 1,
}

/// Opaque graph handle.
pub struct FolimGraph(Arc<Graph>);

/// Opaque formula handle.
pub struct FolimFormula(Formula);

/// Opaque duplicator-strategy handle; advances with each response.
pub struct FolimStrategy(StrategyState);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul removed"));
}

fn guard(f: impl FnOnce() -> Result<(), (FolimStatus, String)>) -> FolimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FolimStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FolimStatus::Panic
        }
    }
}

fn fail<E: std::fmt::Display>(status: FolimStatus) -> impl Fn(E) -> (FolimStatus, String) {
    move |e| (status, e.to_string())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, (FolimStatus, String)> {
    if s.is_null() {
        return Err((FolimStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(fail(FolimStatus::InvalidUtf8))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (FolimStatus, String)> {
    p.as_ref().ok_or((FolimStatus::NullPointer, "null handle".into()))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, (FolimStatus, String)> {
    p.as_mut().ok_or((FolimStatus::NullPointer, "null output pointer".into()))
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn folim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn folim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn folim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds `H_n`.
///
/// # Safety
/// `out_graph` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn folim_graph_hn(n: u32, out_graph: *mut *mut FolimGraph) -> FolimStatus {
    guard(|| {
        let slot = out(out_graph)?;
        let g = generate_hn(n, Limits::default().hn_cap).map_err(fail(FolimStatus::CapExceeded))?;
        *slot = Box::into_raw(Box::new(FolimGraph(Arc::new(g))));
        Ok(())
    })
}

/// Parses a graph from JSON or edge-list text.
///
/// # Safety
/// `src` must be a nul-terminated string and `out_graph` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn folim_graph_parse(src: *const c_char, out_graph: *mut *mut FolimGraph) -> FolimStatus {
    guard(|| {
        let slot = out(out_graph)?;
        let g = Graph::parse_auto(text(src)?).map_err(fail(FolimStatus::Graph))?;
        *slot = Box::into_raw(Box::new(FolimGraph(Arc::new(g))));
        Ok(())
    })
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn folim_graph_order(g: *const FolimGraph, out_order: *mut usize) -> FolimStatus {
    guard(|| {
        *out(out_order)? = handle(g)?.0.order();
        Ok(())
    })
}

/// The graph as JSON; free the result with [`folim_string_free`].
///
/// # Safety
/// `g` must be a live graph handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn folim_graph_to_json(g: *const FolimGraph, out_json: *mut *mut c_char) -> FolimStatus {
    guard(|| {
        let slot = out(out_json)?;
        let s = handle(g)?.0.to_json().to_string();
        *slot = CString::new(s).expect("json has no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn folim_graph_free(g: *mut FolimGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `src` must be a nul-terminated string and `out_formula` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn folim_formula_parse(src: *const c_char, out_formula: *mut *mut FolimFormula) -> FolimStatus {
    guard(|| {
        let slot = out(out_formula)?;
        let f = parse_formula(text(src)?).map_err(fail(FolimStatus::Parse))?;
        *slot = Box::into_raw(Box::new(FolimFormula(f)));
        Ok(())
    })
}

/// Canonical text of the formula; free with [`folim_string_free`].
///
/// # Safety
/// `f` must be a live formula handle and `out_text` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn folim_formula_to_string(f: *const FolimFormula, out_text: *mut *mut c_char) -> FolimStatus {
    guard(|| {
        let slot = out(out_text)?;
        let s = handle(f)?.0.to_string();
        *slot = CString::new(s).expect("formula text has no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn folim_formula_free(f: *mut FolimFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Exact Stone pairing as a reduced fraction.
///
/// # Safety
/// Handles must be live; out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn folim_stone_exact(
    g: *const FolimGraph,
    f: *const FolimFormula,
    out_numer: *mut u64,
    out_denom: *mut u64,
) -> FolimStatus {
    guard(|| {
        let (num, den) = (out(out_numer)?, out(out_denom)?);
        let r = stone_pairing_exact(&handle(g)?.0, &handle(f)?.0).map_err(fail(FolimStatus::Eval))?;
        *num = *r.numer();
        *den = *r.denom();
        Ok(())
    })
}

/// Sampled Stone pairing with its 99% Hoeffding radius.
///
/// # Safety
/// Handles must be live; out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn folim_stone_mc(
    g: *const FolimGraph,
    f: *const FolimFormula,
    samples: u64,
    seed: u64,
    out_estimate: *mut f64,
    out_radius: *mut f64,
) -> FolimStatus {
    guard(|| {
        let (est, rad) = (out(out_estimate)?, out(out_radius)?);
        let e = stone_pairing_mc(&handle(g)?.0, &handle(f)?.0, SamplingOptions::new(samples, seed))
            .map_err(fail(FolimStatus::Eval))?;
        *est = e.estimate;
        *rad = e.radius;
        Ok(())
    })
}

/// Winner of the `rounds`-round game on the two graphs, without roots.
///
/// # Safety
/// Handles must be live; `out_winner` valid.
#[no_mangle]
pub unsafe extern "C" fn folim_ef_solve(
    left: *const FolimGraph,
    right: *const FolimGraph,
    rounds: usize,
    out_winner: *mut FolimWinner,
) -> FolimStatus {
    guard(|| {
        let slot = out(out_winner)?;
        let w = solve(&handle(left)?.0, &handle(right)?.0, &[], rounds, &Limits::default()).map_err(|e| {
            let status = match e {
                folim::efgame::GameError::CapExceeded(_) => FolimStatus::CapExceeded,
                _ => FolimStatus::Game,
            };
            (status, e.to_string())
        })?;
        *slot = match w {
            Winner::Spoiler => FolimWinner::Spoiler,
            Winner::Duplicator => FolimWinner::Duplicator,
        };
        Ok(())
    })
}

/// Duplicator strategy for a `p`-round game from the empty position.
/// Fails with [`FolimStatus::Precondition`] when the graphs do not qualify.
///
/// # Safety
/// Handles must be live; `out_strategy` valid.
#[no_mangle]
pub unsafe extern "C" fn folim_strategy_new(
    left: *const FolimGraph,
    right: *const FolimGraph,
    p: usize,
    out_strategy: *mut *mut FolimStrategy,
) -> FolimStatus {
    guard(|| {
        let slot = out(out_strategy)?;
        let st = init_state(handle(left)?.0.clone(), handle(right)?.0.clone(), &[], &[], p, &Limits::default())
            .map_err(fail(FolimStatus::Precondition))?;
        *slot = Box::into_raw(Box::new(FolimStrategy(st)));
        Ok(())
    })
}

/// Answers the spoiler's `vertex` on `side` and advances the strategy.
///
/// # Safety
/// `s` must be a live strategy handle; `out_response` valid.
#[no_mangle]
pub unsafe extern "C" fn folim_strategy_respond(
    s: *mut FolimStrategy,
    side: FolimSide,
    vertex: usize,
    out_response: *mut usize,
) -> FolimStatus {
    guard(|| {
        let slot = out(out_response)?;
        let st = s.as_mut().ok_or((FolimStatus::NullPointer, "null handle".to_string()))?;
        let side = match side {
            FolimSide::Left => GameSide::Left,
            FolimSide::Right => GameSide::Right,
        };
        if vertex >= st.0.graph(side).order() {
            return Err((FolimStatus::InvalidArgument, format!("vertex {vertex} out of range")));
        }
        let (w, next, _) = st.0.respond(side, vertex).map_err(fail(FolimStatus::Strategy))?;
        st.0 = next;
        *slot = w;
        Ok(())
    })
}

/// Rounds the strategy can still answer.
///
/// # Safety
/// `s` must be a live strategy handle.
#[no_mangle]
pub unsafe extern "C" fn folim_strategy_budget(s: *const FolimStrategy, out_budget: *mut usize) -> FolimStatus {
    guard(|| {
        *out(out_budget)? = handle(s)?.0.budget();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn folim_strategy_free(s: *mut FolimStrategy) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
