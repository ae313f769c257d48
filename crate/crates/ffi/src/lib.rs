//! C ABI over `idgap-core`.
//!
//! Objects cross the boundary as opaque handles created by `idgap_*_new` or
//! `idgap_*_parse` and released by the matching `idgap_*_free`. Every
//! fallible call returns an [`IdgapStatus`]; on failure the message is
//! available from [`idgap_last_error`] on the same thread. Strings returned
//! by the library are owned by the caller and released with
//! [`idgap_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use idgap_core::activation::{ActivationSet, IngredientSet};
use idgap_core::analysis::{analyze, AnalysisConfig};
use idgap_core::format::{parse_identity, parse_trace, MetricsReport};
use idgap_core::metrics::{persistence_streaming, MetricParams, PersistenceStream, Ratio};
use idgap_core::{Error, EvalSelector, GroundedIdentity, WindowConfig};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdgapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Structural = 4,
    Parameter = 5,
    Range = 6,
    Metric = 7,
    Io = 8,
    Simulation = 9,
    Panic = 10,
}

impl From<&Error> for IdgapStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Sequence { .. } | Error::Format { .. } => IdgapStatus::Parse,
            Error::Structural(_) | Error::Lookup { .. } => IdgapStatus::Structural,
            Error::Parameter(_) => IdgapStatus::Parameter,
            Error::Range(_) | Error::Stream { .. } => IdgapStatus::Range,
            Error::Metric(_) => IdgapStatus::Metric,
            Error::Io { .. } => IdgapStatus::Io,
            Error::Step { source, .. } => IdgapStatus::from(source.as_ref()),
            _ => IdgapStatus::Simulation,
        }
    }
}

/// Grounded identity.
pub struct IdgapIdentity(GroundedIdentity);

/// Activation-set sequence.
pub struct IdgapTrace {
    k: usize,
    steps: Vec<ActivationSet>,
}

/// Metrics report.
pub struct IdgapReport(MetricsReport);

/// Incremental persistence over pushed steps.
pub struct IdgapStream {
    inner: Option<PersistenceStream>,
    k: usize,
    next: usize,
}

/// Window and metric settings. A null `eval` selects every valid layer time.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct IdgapWindow {
    pub horizon: usize,
    pub stride: usize,
    pub horizon_max: usize,
    pub eval: *const usize,
    pub eval_len: usize,
}

/// Metric thresholds; see `idgap_default_params`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct IdgapParams {
    pub delta_i: f64,
    pub delta_cons: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub ref_index: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: IdgapStatus, message: impl Into<String>) -> IdgapStatus {
    set_error(message.into());
    status
}

fn from_error(e: Error) -> IdgapStatus {
    let status = IdgapStatus::from(&e);
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into `IdgapStatus::Panic`.
fn guard(f: impl FnOnce() -> IdgapStatus) -> IdgapStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(IdgapStatus::Panic, "internal panic"))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, IdgapStatus> {
    if p.is_null() {
        return Err(fail(IdgapStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(IdgapStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, IdgapStatus> {
    p.as_ref()
        .ok_or_else(|| fail(IdgapStatus::NullPointer, format!("null {what} handle")))
}

unsafe fn indices<'a>(p: *const usize, n: usize) -> Result<&'a [usize], IdgapStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(IdgapStatus::NullPointer, "null index array"));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

fn step_set(k: usize, idx: &[usize]) -> Result<IngredientSet, IdgapStatus> {
    if let Some(&bad) = idx.iter().find(|&&i| i >= k) {
        return Err(fail(IdgapStatus::Structural, format!("ingredient index {bad} is outside 0..{k}")));
    }
    Ok(IngredientSet::from_indices(idx.iter().copied()))
}

unsafe fn window_config(w: &IdgapWindow, len: usize) -> Result<WindowConfig, IdgapStatus> {
    let selector = if w.eval.is_null() {
        EvalSelector::AllValid
    } else {
        EvalSelector::List(indices(w.eval, w.eval_len)?.to_vec())
    };
    WindowConfig::resolve(w.horizon, w.stride, &selector, w.horizon_max, len).map_err(from_error)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> IdgapStatus {
    if out.is_null() {
        return fail(IdgapStatus::NullPointer, "null output pointer");
    }
    *out = value;
    IdgapStatus::Ok
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message of the last failed call on this thread, or null. Caller frees it.
#[no_mangle]
pub extern "C" fn idgap_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

#[no_mangle]
pub unsafe extern "C" fn idgap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn idgap_default_params() -> IdgapParams {
    let d = MetricParams::default();
    IdgapParams {
        delta_i: d.delta_i,
        delta_cons: d.delta_cons,
        epsilon: d.epsilon,
        alpha: d.alpha,
        ref_index: 0,
    }
}

/// Parses an identity spec (JSON document or JSON lines).
#[no_mangle]
pub unsafe extern "C" fn idgap_identity_parse(text: *const c_char, out: *mut *mut IdgapIdentity) -> IdgapStatus {
    guard(|| {
        let text = tri!(str_arg(text));
        match parse_identity(text) {
            Ok(f) => write_out(out, Box::into_raw(Box::new(IdgapIdentity(f.identity)))),
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn idgap_identity_k(identity: *const IdgapIdentity) -> usize {
    identity.as_ref().map_or(0, |i| i.0.k())
}

#[no_mangle]
pub unsafe extern "C" fn idgap_identity_free(identity: *mut IdgapIdentity) {
    if !identity.is_null() {
        drop(Box::from_raw(identity));
    }
}

/// Empty trace over `k` ingredients.
#[no_mangle]
pub unsafe extern "C" fn idgap_trace_new(k: usize, out: *mut *mut IdgapTrace) -> IdgapStatus {
    if k == 0 {
        return fail(IdgapStatus::Structural, "identity needs at least one ingredient");
    }
    write_out(out, Box::into_raw(Box::new(IdgapTrace { k, steps: Vec::new() })))
}

/// Parses a JSON-lines trace in either form against `identity`.
#[no_mangle]
pub unsafe extern "C" fn idgap_trace_parse(
    text: *const c_char,
    identity: *const IdgapIdentity,
    out: *mut *mut IdgapTrace,
) -> IdgapStatus {
    guard(|| {
        let text = tri!(str_arg(text));
        let identity = tri!(ref_arg(identity, "identity"));
        let steps = match parse_trace(text).and_then(|t| t.activations(&identity.0)) {
            Ok(s) => s,
            Err(e) => return from_error(e),
        };
        write_out(out, Box::into_raw(Box::new(IdgapTrace { k: identity.0.k(), steps })))
    })
}

/// Appends one step whose active ingredients are `active[0..n]`.
#[no_mangle]
pub unsafe extern "C" fn idgap_trace_push(trace: *mut IdgapTrace, active: *const usize, n: usize) -> IdgapStatus {
    guard(|| {
        let Some(trace) = trace.as_mut() else {
            return fail(IdgapStatus::NullPointer, "null trace handle");
        };
        let set = tri!(step_set(trace.k, tri!(indices(active, n))));
        let u = trace.steps.len();
        trace.steps.push(ActivationSet::new(u, set));
        IdgapStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn idgap_trace_len(trace: *const IdgapTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.steps.len())
}

#[no_mangle]
pub unsafe extern "C" fn idgap_trace_free(trace: *mut IdgapTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

fn check_k(trace: &IdgapTrace, identity: &IdgapIdentity) -> Result<(), IdgapStatus> {
    if trace.k != identity.0.k() {
        return Err(fail(
            IdgapStatus::Structural,
            format!("trace has {} ingredients, identity has {}", trace.k, identity.0.k()),
        ));
    }
    Ok(())
}

/// Weak and strong persistence.
#[no_mangle]
pub unsafe extern "C" fn idgap_persistence(
    trace: *const IdgapTrace,
    identity: *const IdgapIdentity,
    window: *const IdgapWindow,
    p_weak: *mut f64,
    p_strong: *mut f64,
) -> IdgapStatus {
    guard(|| {
        let trace = tri!(ref_arg(trace, "trace"));
        let identity = tri!(ref_arg(identity, "identity"));
        let window = tri!(ref_arg(window, "window"));
        tri!(check_k(trace, identity));
        let cfg = tri!(window_config(window, trace.steps.len()));
        let r = match persistence_streaming(&trace.steps, &identity.0, &cfg) {
            Ok(r) => r,
            Err(e) => return from_error(e),
        };
        tri!(status_result(write_out(p_weak, r.p_weak)));
        write_out(p_strong, r.p_strong)
    })
}

fn status_result(s: IdgapStatus) -> Result<(), IdgapStatus> {
    match s {
        IdgapStatus::Ok => Ok(()),
        other => Err(other),
    }
}

/// Full analysis: persistence, gap ratio, identifiability and continuity.
#[no_mangle]
pub unsafe extern "C" fn idgap_analyze(
    trace: *const IdgapTrace,
    identity: *const IdgapIdentity,
    window: *const IdgapWindow,
    params: *const IdgapParams,
    out: *mut *mut IdgapReport,
) -> IdgapStatus {
    guard(|| {
        let trace = tri!(ref_arg(trace, "trace"));
        let identity = tri!(ref_arg(identity, "identity"));
        let window = tri!(ref_arg(window, "window"));
        let params = tri!(ref_arg(params, "params"));
        tri!(check_k(trace, identity));
        let eval = if window.eval.is_null() {
            EvalSelector::AllValid
        } else {
            EvalSelector::List(tri!(indices(window.eval, window.eval_len)).to_vec())
        };
        let cfg = AnalysisConfig {
            horizon: window.horizon,
            stride: window.stride,
            eval,
            horizon_max: window.horizon_max,
            params: MetricParams {
                delta_i: params.delta_i,
                delta_cons: params.delta_cons,
                epsilon: params.epsilon,
                alpha: params.alpha,
            },
            ref_index: params.ref_index,
            recovery: None,
            outputs: None,
        };
        match analyze(&trace.steps, &identity.0, &cfg) {
            Ok(r) => write_out(out, Box::into_raw(Box::new(IdgapReport(r)))),
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn idgap_report_p_weak(report: *const IdgapReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.p_weak)
}

#[no_mangle]
pub unsafe extern "C" fn idgap_report_p_strong(report: *const IdgapReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.p_strong)
}

/// Gap ratio; `INFINITY` when unbounded, `IDGAP_STATUS_METRIC` when undefined.
#[no_mangle]
pub unsafe extern "C" fn idgap_report_gap_ratio(report: *const IdgapReport, out: *mut f64) -> IdgapStatus {
    let report = tri!(ref_arg(report, "report"));
    match report.0.gap_ratio {
        Some(Ratio::Finite(x)) => write_out(out, x),
        Some(Ratio::Infinite) => write_out(out, f64::INFINITY),
        None => fail(IdgapStatus::Metric, "gap ratio undefined"),
    }
}

/// Report as fixed-layout JSON. Caller frees it.
#[no_mangle]
pub unsafe extern "C" fn idgap_report_json(report: *const IdgapReport) -> *mut c_char {
    match report.as_ref() {
        Some(r) => CString::new(r.0.to_json()).map_or(ptr::null_mut(), CString::into_raw),
        None => {
            set_error("null report handle".into());
            ptr::null_mut()
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn idgap_report_free(report: *mut IdgapReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Streaming persistence. `window->eval` must be non-null: a stream has no
/// length to resolve "every valid layer time" against.
#[no_mangle]
pub unsafe extern "C" fn idgap_stream_new(k: usize, window: *const IdgapWindow, out: *mut *mut IdgapStream) -> IdgapStatus {
    guard(|| {
        let window = tri!(ref_arg(window, "window"));
        if window.eval.is_null() {
            return fail(IdgapStatus::Parameter, "streaming needs an explicit list of layer times");
        }
        let eval = tri!(indices(window.eval, window.eval_len)).to_vec();
        let cfg = match WindowConfig::new(window.horizon, window.stride, eval, window.horizon_max) {
            Ok(c) => c,
            Err(e) => return from_error(e),
        };
        match PersistenceStream::new(k, &cfg) {
            Ok(s) => write_out(
                out,
                Box::into_raw(Box::new(IdgapStream {
                    inner: Some(s),
                    k,
                    next: 0,
                })),
            ),
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn idgap_stream_push(stream: *mut IdgapStream, active: *const usize, n: usize) -> IdgapStatus {
    guard(|| {
        let Some(stream) = stream.as_mut() else {
            return fail(IdgapStatus::NullPointer, "null stream handle");
        };
        let set = tri!(step_set(stream.k, tri!(indices(active, n))));
        let Some(inner) = stream.inner.as_mut() else {
            return fail(IdgapStatus::Parameter, "stream already finished");
        };
        if let Err(e) = inner.push(&ActivationSet::new(stream.next, set)) {
            return from_error(e);
        }
        stream.next += 1;
        IdgapStatus::Ok
    })
}

/// Closes the stream and reports its scores. The handle must still be freed.
#[no_mangle]
pub unsafe extern "C" fn idgap_stream_finish(stream: *mut IdgapStream, p_weak: *mut f64, p_strong: *mut f64) -> IdgapStatus {
    guard(|| {
        let Some(stream) = stream.as_mut() else {
            return fail(IdgapStatus::NullPointer, "null stream handle");
        };
        let Some(inner) = stream.inner.take() else {
            return fail(IdgapStatus::Parameter, "stream already finished");
        };
        match inner.finish() {
            Ok(r) => {
                tri!(status_result(write_out(p_weak, r.p_weak)));
                write_out(p_strong, r.p_strong)
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn idgap_stream_free(stream: *mut IdgapStream) {
    if !stream.is_null() {
        drop(Box::from_raw(stream));
    }
}
