//! C ABI over `spinsat`.
//!
//! Formulas and Hamiltonians are opaque heap handles owned by the caller and
//! released with the matching `_free` function. Every fallible call returns a
//! [`SpinsatStatus`]; on failure the message is available from
//! [`spinsat_last_error`] on the same thread until the next failing call.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spinsat::analysis;
use spinsat::anneal::{self, FlipMode, Schedule};
use spinsat::cnf::{self, Formula, ParseOptions};
use spinsat::ising::{self, GadgetMode, Hamiltonian, SpinState};
use spinsat::satcore;
use spinsat::Error;

/// Parsed CNF formula.
pub struct SpinsatFormula(Formula);

/// Compiled pairwise Hamiltonian.
pub struct SpinsatHamiltonian(Hamiltonian);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinsatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Mismatch = 5,
    Unsatisfiable = 6,
    Internal = 7,
    Panic = 8,
}

/// Tail averages of one annealing run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpinsatAnnealResult {
    pub final_energy_h: f64,
    pub final_energy_logic: f64,
    pub final_abs_m: f64,
    /// Logical energy of the last state.
    pub last_energy_logic: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SpinsatStatus {
    match e {
        Error::MalformedHeader { .. }
        | Error::MalformedClause { .. }
        | Error::LiteralOutOfRange { .. }
        | Error::EmptyClause { .. }
        | Error::UnterminatedClause
        | Error::ClauseCountMismatch { .. }
        | Error::MissingHeader => SpinsatStatus::Parse,
        Error::LengthMismatch { .. } | Error::HamiltonianMismatch { .. } => SpinsatStatus::Mismatch,
        Error::Io { .. } | Error::Csv(_) | Error::Config(_) => SpinsatStatus::Internal,
        _ => SpinsatStatus::InvalidArgument,
    }
}

/// Runs `f`, recording the error message and mapping panics.
fn guard(f: impl FnOnce() -> Result<(), (SpinsatStatus, String)>) -> SpinsatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpinsatStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside spinsat".into());
            SpinsatStatus::Panic
        }
    }
}

fn lib<T>(r: spinsat::Result<T>) -> Result<T, (SpinsatStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SpinsatStatus, String) {
    (SpinsatStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, (SpinsatStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SpinsatStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SpinsatStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn spinsat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses DIMACS text. `name` may be null.
///
/// # Safety
/// `text` and `name` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinsat_formula_parse(
    text: *const c_char,
    name: *const c_char,
    lenient: bool,
    out: *mut *mut SpinsatFormula,
) -> SpinsatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = string(text, "text")?;
        let name = if name.is_null() { "" } else { string(name, "name")? };
        let f = lib(cnf::parse_dimacs_with(text, name, ParseOptions { lenient }))?;
        *out = Box::into_raw(Box::new(SpinsatFormula(f)));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from [`spinsat_formula_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spinsat_formula_free(f: *mut SpinsatFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live formula handle.
#[no_mangle]
pub unsafe extern "C" fn spinsat_formula_num_vars(f: *const SpinsatFormula) -> usize {
    f.as_ref().map_or(0, |f| f.0.num_vars())
}

/// # Safety
/// `f` must be null or a live formula handle.
#[no_mangle]
pub unsafe extern "C" fn spinsat_formula_num_clauses(f: *const SpinsatFormula) -> usize {
    f.as_ref().map_or(0, |f| f.0.num_clauses())
}

/// Writes a model into `values` (1 true, 0 false; `len` must equal the
/// variable count). Returns `UNSATISFIABLE` when there is none.
///
/// # Safety
/// `values` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn spinsat_formula_solve(f: *const SpinsatFormula, values: *mut u8, len: usize) -> SpinsatStatus {
    guard(|| {
        let f = &borrow(f, "formula")?.0;
        if values.is_null() {
            return Err(null("values"));
        }
        if len != f.num_vars() {
            return Err((
                SpinsatStatus::Mismatch,
                format!("buffer holds {len} values, formula has {}", f.num_vars()),
            ));
        }
        let model = satcore::solve(f).ok_or((SpinsatStatus::Unsatisfiable, "formula is unsatisfiable".into()))?;
        let out = std::slice::from_raw_parts_mut(values, len);
        for (o, &v) in out.iter_mut().zip(model.values()) {
            *o = v as u8;
        }
        Ok(())
    })
}

/// Number of unsatisfied clauses under `values` (nonzero is true).
///
/// # Safety
/// `values` must point to `len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn spinsat_formula_energy(
    f: *const SpinsatFormula,
    values: *const u8,
    len: usize,
    out: *mut usize,
) -> SpinsatStatus {
    guard(|| {
        let f = &borrow(f, "formula")?.0;
        if values.is_null() || out.is_null() {
            return Err(null("values/out"));
        }
        let a = cnf::Assignment::new(
            std::slice::from_raw_parts(values, len)
                .iter()
                .map(|&v| v != 0)
                .collect(),
        );
        *out = lib(cnf::logical_energy(f, &a))?;
        Ok(())
    })
}

/// Compiles a formula. `paper_literal` selects the published (inexact)
/// gadget; pass `k_factor <= 0` for the default.
///
/// # Safety
/// `f` must be a live formula handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinsat_compile(
    f: *const SpinsatFormula,
    k_factor: f64,
    paper_literal: bool,
    out: *mut *mut SpinsatHamiltonian,
) -> SpinsatStatus {
    guard(|| {
        let f = &borrow(f, "formula")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let k = if k_factor <= 0.0 {
            ising::DEFAULT_K_FACTOR
        } else {
            k_factor
        };
        let mode = if paper_literal {
            GadgetMode::PaperLiteral
        } else {
            GadgetMode::Corrected
        };
        let h = lib(ising::compile_with(f, k, mode))?;
        *out = Box::into_raw(Box::new(SpinsatHamiltonian(h)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`spinsat_compile`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spinsat_hamiltonian_free(h: *mut SpinsatHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Core plus ancilla spins, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live Hamiltonian handle.
#[no_mangle]
pub unsafe extern "C" fn spinsat_hamiltonian_num_spins(h: *const SpinsatHamiltonian) -> usize {
    h.as_ref().map_or(0, |h| h.0.num_spins())
}

/// # Safety
/// `h` must be null or a live Hamiltonian handle.
#[no_mangle]
pub unsafe extern "C" fn spinsat_hamiltonian_core_count(h: *const SpinsatHamiltonian) -> usize {
    h.as_ref().map_or(0, |h| h.0.core_count())
}

/// Energy of a ±1 spin vector of length `num_spins`.
///
/// # Safety
/// `spins` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinsat_hamiltonian_energy(
    h: *const SpinsatHamiltonian,
    spins: *const i8,
    len: usize,
    out: *mut f64,
) -> SpinsatStatus {
    guard(|| {
        let h = &borrow(h, "hamiltonian")?.0;
        if spins.is_null() || out.is_null() {
            return Err(null("spins/out"));
        }
        let s = lib(SpinState::new(std::slice::from_raw_parts(spins, len).to_vec()))?;
        *out = lib(ising::hamiltonian_energy(h, &s))?;
        Ok(())
    })
}

/// Writes the node and edge tables as NUL-terminated strings owned by the
/// caller (release with [`spinsat_string_free`]).
///
/// # Safety
/// `nodes` and `edges` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinsat_hamiltonian_tables(
    h: *const SpinsatHamiltonian,
    nodes: *mut *mut c_char,
    edges: *mut *mut c_char,
) -> SpinsatStatus {
    guard(|| {
        let h = &borrow(h, "hamiltonian")?.0;
        if nodes.is_null() || edges.is_null() {
            return Err(null("nodes/edges"));
        }
        let t = lib(ising::export_csv(h))?;
        *nodes = into_c_string(t.nodes);
        *edges = into_c_string(t.edges);
        Ok(())
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spinsat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Anneals `h` (compiled from `f`) with `T_t = t0 * alpha^t`. `sweeps`
/// attempts one flip per spin per step. `csv` may be null; otherwise it
/// receives the trajectory CSV, owned by the caller.
///
/// # Safety
/// Handles must be live; `result` must be writable; `csv` null or writable.
#[no_mangle]
pub unsafe extern "C" fn spinsat_anneal(
    h: *const SpinsatHamiltonian,
    f: *const SpinsatFormula,
    t0: f64,
    alpha: f64,
    steps: usize,
    sweeps: bool,
    seed: u64,
    result: *mut SpinsatAnnealResult,
    csv: *mut *mut c_char,
) -> SpinsatStatus {
    guard(|| {
        let h = &borrow(h, "hamiltonian")?.0;
        let f = &borrow(f, "formula")?.0;
        if result.is_null() {
            return Err(null("result"));
        }
        let flips = if sweeps { FlipMode::Sweep } else { FlipMode::Single };
        let sched = lib(Schedule::new(t0, alpha, steps))?.with_flips(flips);
        let tr = lib(anneal::anneal(h, f, &sched, seed))?;
        let tail = |xs: Vec<f64>| lib(analysis::tail_mean(&xs, analysis::DEFAULT_TAIL_FRACTION));
        *result = SpinsatAnnealResult {
            final_energy_h: tail(tr.energies_h())?,
            final_energy_logic: tail(tr.energies_logic())?,
            final_abs_m: tail(tr.abs_magnetizations())?,
            last_energy_logic: tr.points.last().map_or(f64::NAN, |p| p.energy_logic as f64),
        };
        if !csv.is_null() {
            *csv = into_c_string(tr.to_csv());
        }
        Ok(())
    })
}

/// Default schedule parameters. Null pointers are skipped.
///
/// # Safety
/// Each pointer must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn spinsat_default_schedule(t0: *mut f64, alpha: *mut f64, steps: *mut usize) {
    if let Some(t) = t0.as_mut() {
        *t = anneal::DEFAULT_T0;
    }
    if let Some(a) = alpha.as_mut() {
        *a = anneal::DEFAULT_ALPHA;
    }
    if let Some(s) = steps.as_mut() {
        *s = anneal::DEFAULT_STEPS;
    }
}
