// SPDX-License-Identifier: Apache-2.0

//! C ABI over the core workbench: interpret terms into strategies behind an
//! opaque handle, run the operational semantics, and query conditions and
//! equivalences. Every entry point is panic-safe and reports failures
//! through status codes plus a thread-local error message.
//!
//! The companion header lives in `include/cgames.h` and is kept in sync by
//! a test that compares the exported symbol list against the declarations.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cgames_core::arena::Budget;
use cgames_core::conditions;
use cgames_core::interp::{interpret, Interp};
use cgames_core::lang::{parse, run, LangError, RunResult};
use cgames_core::positions::positionally_equivalent;
use cgames_core::strategy::positive_iso;

/// Status codes mirrored in the header.
pub const CG_OK: c_int = 0;
pub const CG_ERR_NULL: c_int = 1;
pub const CG_ERR_UTF8: c_int = 2;
pub const CG_ERR_PARSE: c_int = 3;
pub const CG_ERR_TYPE: c_int = 4;
pub const CG_ERR_BUDGET: c_int = 5;
pub const CG_ERR_INVALID: c_int = 6;
pub const CG_ERR_PANIC: c_int = 7;

/// Opaque interpreted-strategy handle.
pub struct CgStrategy {
    interp: Interp,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', "?")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn lang_status(e: &LangError) -> c_int {
    match e {
        LangError::Parse(..) => CG_ERR_PARSE,
        LangError::Type(_) => CG_ERR_TYPE,
        LangError::Budget(_) | LangError::Fuel(_) => CG_ERR_BUDGET,
        _ => CG_ERR_INVALID,
    }
}

/// # Safety: `s` must be NULL or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, c_int> {
    if s.is_null() {
        set_error("null string argument");
        return Err(CG_ERR_NULL);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        CG_ERR_UTF8
    })
}

fn guarded(f: impl FnOnce() -> c_int) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(c) => c,
        Err(_) => {
            set_error("internal panic");
            CG_ERR_PANIC
        }
    }
}

fn budget(width: usize, nat_max: usize, unroll: usize, fuel: usize, max_events: usize) -> Budget {
    Budget {
        bang_width: width,
        nat_max,
        unroll_depth: unroll,
        run_fuel: fuel,
        max_events,
    }
}

fn out_string(s: String, out: *mut *mut c_char) -> c_int {
    let c = match CString::new(s) {
        Ok(c) => c,
        Err(_) => {
            set_error("output contains interior NUL");
            return CG_ERR_INVALID;
        }
    };
    unsafe { *out = c.into_raw() };
    CG_OK
}

/// Library version string; static storage, do not free.
#[no_mangle]
pub extern "C" fn cg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent error on this thread; valid until the next
/// failing call. Do not free.
#[no_mangle]
pub extern "C" fn cg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Free a string returned through a `char **` out-parameter.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn cg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Run a closed term operationally; `*converges` is 1 for may-convergence.
///
/// # Safety
/// `term` must be a valid NUL-terminated string; `converges` non-NULL.
#[no_mangle]
pub unsafe extern "C" fn cg_run(
    term: *const c_char,
    nat_max: usize,
    fuel: usize,
    converges: *mut c_int,
) -> c_int {
    guarded(|| {
        let src = match read_str(term) {
            Ok(s) => s,
            Err(c) => return c,
        };
        if converges.is_null() {
            set_error("null out-parameter");
            return CG_ERR_NULL;
        }
        let b = budget(2, nat_max, 3, fuel, 5_000);
        let parsed = match parse(src, &[]) {
            Ok((t, _)) => t,
            Err(e) => {
                set_error(&e.to_string());
                return lang_status(&e);
            }
        };
        match run(&parsed, &b) {
            Ok(r) => {
                *converges = matches!(r, RunResult::Converges(_)) as c_int;
                CG_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                lang_status(&e)
            }
        }
    })
}

/// Interpret a closed term as a causal strategy. On success `*out` owns a
/// handle that must be released with `cg_strategy_free`.
///
/// # Safety
/// `term` must be a valid NUL-terminated string; `out` non-NULL.
#[no_mangle]
pub unsafe extern "C" fn cg_interpret(
    term: *const c_char,
    width: usize,
    nat_max: usize,
    unroll: usize,
    fuel: usize,
    max_events: usize,
    out: *mut *mut CgStrategy,
) -> c_int {
    guarded(|| {
        let src = match read_str(term) {
            Ok(s) => s,
            Err(c) => return c,
        };
        if out.is_null() {
            set_error("null out-parameter");
            return CG_ERR_NULL;
        }
        let b = budget(width, nat_max, unroll, fuel, max_events);
        let parsed = match parse(src, &[]) {
            Ok((t, _)) => t,
            Err(e) => {
                set_error(&e.to_string());
                return lang_status(&e);
            }
        };
        match interpret(&parsed, &[], &b) {
            Ok(interp) => {
                *out = Box::into_raw(Box::new(CgStrategy { interp }));
                CG_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                lang_status(&e)
            }
        }
    })
}

/// Release a strategy handle.
///
/// # Safety
/// `s` must be NULL or a handle returned by `cg_interpret`.
#[no_mangle]
pub unsafe extern "C" fn cg_strategy_free(s: *mut CgStrategy) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of strategy events.
///
/// # Safety
/// `s` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn cg_strategy_events(s: *const CgStrategy) -> usize {
    if s.is_null() {
        return 0;
    }
    (*s).interp.strategy.es.len()
}

/// JSON rendering of the strategy; `*out` must be freed with
/// `cg_string_free`.
///
/// # Safety
/// `s` must be a valid handle; `out` non-NULL.
#[no_mangle]
pub unsafe extern "C" fn cg_strategy_json(
    s: *const CgStrategy,
    out: *mut *mut c_char,
) -> c_int {
    guarded(|| {
        if s.is_null() || out.is_null() {
            set_error("null argument");
            return CG_ERR_NULL;
        }
        out_string((*s).interp.strategy.to_json().to_string(), out)
    })
}

/// DOT rendering of the strategy; `*out` must be freed with
/// `cg_string_free`.
///
/// # Safety
/// `s` must be a valid handle; `name` a valid string; `out` non-NULL.
#[no_mangle]
pub unsafe extern "C" fn cg_strategy_dot(
    s: *const CgStrategy,
    name: *const c_char,
    out: *mut *mut c_char,
) -> c_int {
    guarded(|| {
        if s.is_null() || out.is_null() {
            set_error("null argument");
            return CG_ERR_NULL;
        }
        let n = match read_str(name) {
            Ok(n) => n,
            Err(c) => return c,
        };
        out_string((*s).interp.strategy.to_dot(n), out)
    })
}

/// Evaluate a named semantic condition (`deterministic`, `visible`,
/// `pre-innocent`, `innocent`, `sequential`, `wb`, `causally-wb`,
/// `complete`); `*holds` is 1 if it passes.
///
/// # Safety
/// `s` must be a valid handle; `condition` a valid string; `holds` non-NULL.
#[no_mangle]
pub unsafe extern "C" fn cg_check(
    s: *const CgStrategy,
    condition: *const c_char,
    cap: usize,
    holds: *mut c_int,
) -> c_int {
    guarded(|| {
        if s.is_null() || holds.is_null() {
            set_error("null argument");
            return CG_ERR_NULL;
        }
        let name = match read_str(condition) {
            Ok(n) => n,
            Err(c) => return c,
        };
        let st = &(*s).interp.strategy;
        let pass = match name {
            "deterministic" => conditions::deterministic(st),
            "visible" => conditions::visible(st, cap),
            "pre-innocent" => conditions::pre_innocent(st),
            "innocent" => conditions::parallel_innocent(st, cap),
            "sequential" => conditions::sequential(st, cap, 64),
            "wb" => conditions::well_bracketed(st, cap, 64),
            "causally-wb" => conditions::causally_wb(st, cap),
            "complete" => conditions::complete_strategy(st, cap),
            _ => {
                set_error("unknown condition");
                return CG_ERR_INVALID;
            }
        };
        *holds = pass as c_int;
        CG_OK
    })
}

/// Positive isomorphism of two interpreted strategies.
///
/// # Safety
/// Both handles must be valid.
#[no_mangle]
pub unsafe extern "C" fn cg_positive_iso(
    a: *const CgStrategy,
    b: *const CgStrategy,
) -> c_int {
    if a.is_null() || b.is_null() {
        return 0;
    }
    guarded(|| positive_iso(&(*a).interp.strategy, &(*b).interp.strategy) as c_int)
}

/// Positional equivalence of two interpreted strategies; `*equal` is 1 when
/// their collapses agree.
///
/// # Safety
/// Both handles must be valid; `equal` non-NULL.
#[no_mangle]
pub unsafe extern "C" fn cg_positionally_equivalent(
    a: *const CgStrategy,
    b: *const CgStrategy,
    cap: usize,
    equal: *mut c_int,
) -> c_int {
    guarded(|| {
        if a.is_null() || b.is_null() || equal.is_null() {
            set_error("null argument");
            return CG_ERR_NULL;
        }
        match positionally_equivalent(&(*a).interp.strategy, &(*b).interp.strategy, cap) {
            Ok(e) => {
                *equal = e as c_int;
                CG_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                CG_ERR_INVALID
            }
        }
    })
}
