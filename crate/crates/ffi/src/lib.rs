//! C ABI over the gatecomm toolkit.
//!
//! Every fallible call returns a [`GcStatus`]; on anything but `GC_OK` the
//! message for the calling thread is available from [`gc_last_error`].
//! Strings handed out by the library must be released with
//! [`gc_string_free`], handles with their matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gatecomm::cli::{run_experiment, Format, Params};
use gatecomm::concentration::{concentrate, SchmidtSpectrum};
use gatecomm::gates::gate_by_name;
use gatecomm::resources::{expr_equal, parse_expr, region_reverse, CapacityTriple, ResourceExpr};
use gatecomm::simcore::{QState, StateDump};
use gatecomm::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Layout = 4,
    Contract = 5,
    Size = 6,
    ReverseUndefined = 7,
    Parse = 8,
    UnknownName = 9,
    Json = 10,
    Panic = 99,
}

impl From<&Error> for GcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => GcStatus::Domain,
            Error::Layout(_) => GcStatus::Layout,
            Error::Contract(_) => GcStatus::Contract,
            Error::Size(_) => GcStatus::Size,
            Error::ReverseUndefined => GcStatus::ReverseUndefined,
            Error::Parse { .. } => GcStatus::Parse,
            Error::UnknownName(_) => GcStatus::UnknownName,
        }
    }
}

/// Opaque resource expression.
pub struct GcExpr(ResourceExpr);

/// Opaque pure state.
pub struct GcState(QState);

/// Point of a capacity region: forward, backward and entanglement rates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcTriple {
    pub c1: f64,
    pub c2: f64,
    pub e: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(GcStatus::from(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(GcStatus::Json, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GcStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("panic inside gatecomm".into());
            GcStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(GcStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GcStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(GcStatus::Domain, "interior NUL in output".into()))?;
    write_out(out, c.into_raw(), "out")
}

/// Message of the last failed call on this thread, or NULL. Owned by the
/// library and valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a resource expression such as `2[q->qq] - [qq]`.
///
/// # Safety
/// `src` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_expr_parse(src: *const c_char, out: *mut *mut GcExpr) -> GcStatus {
    guard(|| {
        let e = parse_expr(str_arg(src, "src")?)?;
        write_out(out, Box::into_raw(Box::new(GcExpr(e))), "out")
    })
}

/// # Safety
/// `e` is NULL or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gc_expr_free(e: *mut GcExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

unsafe fn derive_expr(
    e: *const GcExpr,
    out: *mut *mut GcExpr,
    f: impl FnOnce(&ResourceExpr) -> Result<ResourceExpr, Error>,
) -> GcStatus {
    guard(|| {
        let src = e.as_ref().ok_or_else(|| null("e"))?;
        let r = f(&src.0)?;
        write_out(out, Box::into_raw(Box::new(GcExpr(r))), "out")
    })
}

/// Canonical form: cobits and cocobits rewritten into qubits and ebits.
///
/// # Safety
/// `e` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_expr_canonicalize(e: *const GcExpr, out: *mut *mut GcExpr) -> GcStatus {
    derive_expr(e, out, |x| Ok(x.canonicalize()))
}

/// Swaps the roles of the two parties.
///
/// # Safety
/// `e` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_expr_exchange(e: *const GcExpr, out: *mut *mut GcExpr) -> GcStatus {
    derive_expr(e, out, |x| Ok(x.exchange()))
}

/// Time reversal. Fails with `GC_STATUS_REVERSE_UNDEFINED` on cbits.
///
/// # Safety
/// `e` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_expr_reverse(e: *const GcExpr, out: *mut *mut GcExpr) -> GcStatus {
    derive_expr(e, out, ResourceExpr::reverse)
}

/// Writes whether `a` and `b` are equal after canonicalization.
///
/// # Safety
/// `a` and `b` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_expr_equal(a: *const GcExpr, b: *const GcExpr, out: *mut bool) -> GcStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        write_out(out, expr_equal(&a.0, &b.0), "out")
    })
}

/// Text form of an expression; free with [`gc_string_free`].
///
/// # Safety
/// `e` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_expr_to_string(e: *const GcExpr, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(|| null("e"))?;
        write_string(out, e.0.to_string())
    })
}

/// Builds a state from `{"wires": [...], "amplitudes": [[re, im], ...]}`.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_state_from_json(json: *const c_char, out: *mut *mut GcState) -> GcStatus {
    guard(|| {
        let dump: StateDump = serde_json::from_str(str_arg(json, "json")?)?;
        let s = QState::from_dump(&dump)?;
        write_out(out, Box::into_raw(Box::new(GcState(s))), "out")
    })
}

/// # Safety
/// `s` is NULL or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gc_state_free(s: *mut GcState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Applies a registered gate (e.g. `v_m:2`) to the named wires in place.
///
/// # Safety
/// `s` is a live handle; `gate` is a NUL-terminated string; `targets`
/// points to `n_targets` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn gc_state_apply_gate(
    s: *mut GcState,
    gate: *const c_char,
    targets: *const *const c_char,
    n_targets: usize,
) -> GcStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null("s"))?;
        let g = gate_by_name(str_arg(gate, "gate")?)?;
        if targets.is_null() && n_targets > 0 {
            return Err(null("targets"));
        }
        let mut names = Vec::with_capacity(n_targets);
        for i in 0..n_targets {
            names.push(str_arg(*targets.add(i), "targets[i]")?);
        }
        s.0.apply_in_place(&g, &names)?;
        Ok(())
    })
}

/// Total dimension of the register.
///
/// # Safety
/// `s` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_state_dim(s: *const GcState, out: *mut usize) -> GcStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("s"))?;
        write_out(out, s.0.dim(), "out")
    })
}

/// Amplitude at a big-endian basis index.
///
/// # Safety
/// `s` is a live handle; `re` and `im` are writable.
#[no_mangle]
pub unsafe extern "C" fn gc_state_amplitude(s: *const GcState, index: usize, re: *mut f64, im: *mut f64) -> GcStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("s"))?;
        let a = *s.0.amplitudes().get(index).ok_or_else(|| {
            Failure(GcStatus::Domain, format!("index {index} out of range for dimension {}", s.0.dim()))
        })?;
        write_out(re, a.re, "re")?;
        write_out(im, a.im, "im")
    })
}

/// Serializes a state in the format read by [`gc_state_from_json`].
///
/// # Safety
/// `s` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_state_to_json(s: *const GcState, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("s"))?;
        write_string(out, serde_json::to_string(&s.0.dump())?)
    })
}

/// Capacity-region point of the time-reversed protocol.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_region_reverse(t: GcTriple, out: *mut GcTriple) -> GcStatus {
    guard(|| {
        let r = region_reverse(CapacityTriple::new(t.c1, t.c2, t.e));
        write_out(out, GcTriple { c1: r.c1, c2: r.c2, e: r.e }, "out")
    })
}

/// Concentrates `n` copies of the state with Schmidt coefficients `probs`
/// and writes the report as JSON.
///
/// # Safety
/// `probs` points to `len` doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_concentrate(
    probs: *const f64,
    len: usize,
    n: usize,
    delta: f64,
    out: *mut *mut c_char,
) -> GcStatus {
    guard(|| {
        if probs.is_null() {
            return Err(null("probs"));
        }
        let s = SchmidtSpectrum::from_probs(std::slice::from_raw_parts(probs, len))?;
        let r = concentrate(&vec![s; n], delta)?;
        write_string(out, serde_json::to_string(&r)?)
    })
}

/// Runs a registered experiment and writes its JSON output.
///
/// `params_json` is NULL or an object of parameter values, e.g.
/// `{"m": 2, "trials": 100}`; `seed` and `trials` are read from it too.
///
/// # Safety
/// `name` is a NUL-terminated string; `params_json` is NULL or one;
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gc_run_experiment(
    name: *const c_char,
    params_json: *const c_char,
    out: *mut *mut c_char,
) -> GcStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let obj: serde_json::Map<String, serde_json::Value> = if params_json.is_null() {
            Default::default()
        } else {
            serde_json::from_str(str_arg(params_json, "params_json")?)?
        };
        let mut p = Params::new(0, None);
        for (k, v) in &obj {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let bad = || Failure(GcStatus::Domain, format!("bad value `{text}` for `{k}`"));
            match k.as_str() {
                "seed" => p.seed = text.parse().map_err(|_| bad())?,
                "trials" => p.trials = Some(text.parse().map_err(|_| bad())?),
                _ => p = p.set(k, &text),
            }
        }
        let outcome = run_experiment(name, &p)?;
        write_string(out, outcome.render(Format::Json))
    })
}
