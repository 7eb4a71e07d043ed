//! C ABI over `sp2geo`.
//!
//! Every fallible call returns an [`Sp2Status`]; on failure [`sp2_last_error`] holds a
//! message for the calling thread. Handles are opaque and owned by the caller, who
//! releases them with the matching `*_free`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{CStr, CString, c_char};
use std::panic::{AssertUnwindSafe, catch_unwind};
use std::ptr;

use sp2geo::bundle::{self, ActionKind, SpherePoint7};
use sp2geo::geodesics::{GeodesicTrace, IntegratorConfig, TracePoint, integrate_down, integrate_up};
use sp2geo::hamilton::{Covector, HamiltonianKind};
use sp2geo::lie::{ALGEBRA_DIM, standard_frame};
use sp2geo::quat::{GroupPoint, QuatMat2, mat_exp};
use sp2geo::suites::{self, Suite, SuiteConfig};
use sp2geo::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sp2Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotOnManifold = 3,
    DriftExceeded = 4,
    Unsupported = 5,
    /// The run completed and its report is available, but a check failed.
    CheckFailed = 6,
    Panic = 7,
}

/// Hamiltonian that drives a geodesic.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sp2Kind {
    /// Sub-Riemannian on `D_H` upstairs, on `D` downstairs.
    SubRiemannian = 0,
    /// Sub-Riemannian on `D_K`; upstairs only.
    DistributionK = 1,
    /// Riemannian on `Sp(2)` upstairs, on `S^7` downstairs.
    Riemannian = 2,
}

/// A point of `Sp(2)`.
pub struct Sp2Point(GroupPoint);

enum TraceInner {
    Up(GeodesicTrace<GroupPoint>),
    Down(GeodesicTrace<SpherePoint7>),
}

/// A sampled geodesic.
pub struct Sp2Trace(TraceInner);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> Sp2Status {
    match e {
        Error::NotUnitary(_) | Error::NotOnSphere(_) | Error::NotSkewHermitian(_) => Sp2Status::NotOnManifold,
        Error::DriftExceeded { .. } => Sp2Status::DriftExceeded,
        Error::Unsupported(_) => Sp2Status::Unsupported,
        _ => Sp2Status::InvalidArgument,
    }
}

/// Runs `f`, recording errors and panics for [`sp2_last_error`].
fn guard(f: impl FnOnce() -> Result<Sp2Status, (Sp2Status, String)>) -> Sp2Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            Sp2Status::Panic
        }
    }
}

fn lib(e: Error) -> (Sp2Status, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (Sp2Status, String) {
    (Sp2Status::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (Sp2Status, String) {
    (Sp2Status::InvalidArgument, msg.into())
}

/// Message for the last failed call on this thread, or null. Valid until the next call
/// on the same thread; do not free.
#[no_mangle]
pub extern "C" fn sp2_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sp2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) {
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// The identity matrix.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp2_point_identity(out: *mut *mut Sp2Point) -> Sp2Status {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        unsafe { write_out(out, Sp2Point(GroupPoint::identity())) };
        Ok(Sp2Status::Ok)
    })
}

/// A point from 16 reals: entries a, b, c, d, each as `w, x, y, z`.
/// Matrices within `1e-4` of `Sp(2)` are polished onto it.
///
/// # Safety
/// `reals` must point to 16 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp2_point_from_reals(reals: *const f64, out: *mut *mut Sp2Point) -> Sp2Status {
    guard(|| {
        if reals.is_null() || out.is_null() {
            return Err(null("reals or out"));
        }
        let r: [f64; 16] = unsafe { *(reals as *const [f64; 16]) };
        let q = GroupPoint::new(QuatMat2::from_reals(&r)).map_err(lib)?;
        unsafe { write_out(out, Sp2Point(q)) };
        Ok(Sp2Status::Ok)
    })
}

/// `exp(Σ c_i e_i)` over the standard orthonormal frame of `sp(2)`.
///
/// # Safety
/// `coeffs` must point to 10 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp2_point_exp(coeffs: *const f64, out: *mut *mut Sp2Point) -> Sp2Status {
    guard(|| {
        if coeffs.is_null() || out.is_null() {
            return Err(null("coeffs or out"));
        }
        let c = unsafe { std::slice::from_raw_parts(coeffs, ALGEBRA_DIM) };
        if c.iter().any(|x| !x.is_finite()) {
            return Err(invalid("coefficients must be finite"));
        }
        unsafe { write_out(out, Sp2Point(mat_exp(&standard_frame().combine(c)))) };
        Ok(Sp2Status::Ok)
    })
}

/// # Safety
/// `point` must be a live handle; `out` must have room for 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn sp2_point_to_reals(point: *const Sp2Point, out: *mut f64) -> Sp2Status {
    guard(|| {
        let (Some(p), false) = (unsafe { point.as_ref() }, out.is_null()) else {
            return Err(null("point or out"));
        };
        let r = p.0.matrix().to_reals();
        unsafe { ptr::copy_nonoverlapping(r.as_ptr(), out, r.len()) };
        Ok(Sp2Status::Ok)
    })
}

/// `π_K`: the second column, 8 reals `b, d`.
///
/// # Safety
/// `point` must be a live handle; `out` must have room for 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn sp2_project_s7(point: *const Sp2Point, out: *mut f64) -> Sp2Status {
    guard(|| {
        let (Some(p), false) = (unsafe { point.as_ref() }, out.is_null()) else {
            return Err(null("point or out"));
        };
        let r = bundle::pi_k(&p.0).to_reals();
        unsafe { ptr::copy_nonoverlapping(r.as_ptr(), out, r.len()) };
        Ok(Sp2Status::Ok)
    })
}

/// `π_H` into `S^4 ⊂ H ⊕ R`, 5 reals.
///
/// # Safety
/// `point` must be a live handle; `out` must have room for 5 doubles.
#[no_mangle]
pub unsafe extern "C" fn sp2_project_s4(point: *const Sp2Point, out: *mut f64) -> Sp2Status {
    guard(|| {
        let (Some(p), false) = (unsafe { point.as_ref() }, out.is_null()) else {
            return Err(null("point or out"));
        };
        let r = bundle::pi_h(&p.0).map_err(lib)?.to_reals();
        unsafe { ptr::copy_nonoverlapping(r.as_ptr(), out, r.len()) };
        Ok(Sp2Status::Ok)
    })
}

/// Null is ignored.
///
/// # Safety
/// `point` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp2_point_free(point: *mut Sp2Point) {
    if !point.is_null() {
        drop(unsafe { Box::from_raw(point) });
    }
}

/// Integrates a normal geodesic from `point` with RK4 and retraction.
///
/// `upstairs` selects `Sp(2)` with 10 momentum components, otherwise `S^7` with 7 (the
/// start is `π_K(point)`, with the frame pushed forward from `point`).
///
/// # Safety
/// `point` must be a live handle, `momentum` must point to `momentum_len` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp2_geodesic(
    point: *const Sp2Point,
    upstairs: bool,
    momentum: *const f64,
    momentum_len: usize,
    kind: Sp2Kind,
    step: f64,
    horizon: f64,
    out: *mut *mut Sp2Trace,
) -> Sp2Status {
    guard(|| {
        let Some(p) = (unsafe { point.as_ref() }) else {
            return Err(null("point"));
        };
        if momentum.is_null() || out.is_null() {
            return Err(null("momentum or out"));
        }
        let m = unsafe { std::slice::from_raw_parts(momentum, momentum_len) }.to_vec();
        let cfg = IntegratorConfig::new(step, horizon).map_err(lib)?;
        let q = p.0;
        let trace = if upstairs {
            let kind = match kind {
                Sp2Kind::SubRiemannian => HamiltonianKind::HorizontalH,
                Sp2Kind::DistributionK => HamiltonianKind::HorizontalK,
                Sp2Kind::Riemannian => HamiltonianKind::Full,
            };
            let lambda = Covector::up(q, m).map_err(lib)?;
            TraceInner::Up(integrate_up(&q, &lambda, kind, &cfg).map_err(lib)?)
        } else {
            let kind = match kind {
                Sp2Kind::SubRiemannian => HamiltonianKind::Horizontal,
                Sp2Kind::Riemannian => HamiltonianKind::Quotient,
                Sp2Kind::DistributionK => return Err(invalid("SP2_KIND_DISTRIBUTION_K is upstairs only")),
            };
            let mu = Covector::down(q, m).map_err(lib)?;
            TraceInner::Down(integrate_down(&bundle::pi_k(&q), &mu, kind, &cfg).map_err(lib)?)
        };
        unsafe { write_out(out, Sp2Trace(trace)) };
        Ok(Sp2Status::Ok)
    })
}

impl Sp2Trace {
    fn len(&self) -> usize {
        match &self.0 {
            TraceInner::Up(t) => t.len(),
            TraceInner::Down(t) => t.len(),
        }
    }

    fn point_dim(&self) -> usize {
        match &self.0 {
            TraceInner::Up(_) => GroupPoint::columns().len(),
            TraceInner::Down(_) => SpherePoint7::columns().len(),
        }
    }
}

/// Number of samples, or 0 for null.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp2_trace_len(trace: *const Sp2Trace) -> usize {
    unsafe { trace.as_ref() }.map_or(0, Sp2Trace::len)
}

/// Reals per sample point: 16 upstairs, 8 downstairs; 0 for null.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp2_trace_point_dim(trace: *const Sp2Trace) -> usize {
    unsafe { trace.as_ref() }.map_or(0, Sp2Trace::point_dim)
}

/// Time, point and energy of sample `index`. `point_out` needs
/// [`sp2_trace_point_dim`] doubles; either output may be null.
///
/// # Safety
/// `trace` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp2_trace_sample(
    trace: *const Sp2Trace,
    index: usize,
    time_out: *mut f64,
    point_out: *mut f64,
    energy_out: *mut f64,
) -> Sp2Status {
    guard(|| {
        let Some(t) = (unsafe { trace.as_ref() }) else {
            return Err(null("trace"));
        };
        if index >= t.len() {
            return Err(invalid(format!("index {index} out of range for {} samples", t.len())));
        }
        let (time, point, energy) = match &t.0 {
            TraceInner::Up(t) => (t.times[index], t.points[index].reals(), t.energy[index]),
            TraceInner::Down(t) => (t.times[index], t.points[index].reals(), t.energy[index]),
        };
        unsafe {
            if let Some(o) = time_out.as_mut() {
                *o = time;
            }
            if let Some(o) = energy_out.as_mut() {
                *o = energy;
            }
            if !point_out.is_null() {
                ptr::copy_nonoverlapping(point.as_ptr(), point_out, point.len());
            }
        }
        Ok(Sp2Status::Ok)
    })
}

/// Largest energy and constraint deviation along the trace; either output may be null.
///
/// # Safety
/// `trace` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp2_trace_drift(
    trace: *const Sp2Trace,
    energy_out: *mut f64,
    constraint_out: *mut f64,
) -> Sp2Status {
    guard(|| {
        let Some(t) = (unsafe { trace.as_ref() }) else {
            return Err(null("trace"));
        };
        let (e, c) = match &t.0 {
            TraceInner::Up(t) => (t.energy_drift(), t.constraint_drift()),
            TraceInner::Down(t) => (t.energy_drift(), t.constraint_drift()),
        };
        unsafe {
            if let Some(o) = energy_out.as_mut() {
                *o = e;
            }
            if let Some(o) = constraint_out.as_mut() {
                *o = c;
            }
        }
        Ok(Sp2Status::Ok)
    })
}

/// The trace as CSV; free with [`sp2_string_free`].
///
/// # Safety
/// `trace` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp2_trace_csv(trace: *const Sp2Trace, out: *mut *mut c_char) -> Sp2Status {
    guard(|| {
        let (Some(t), false) = (unsafe { trace.as_ref() }, out.is_null()) else {
            return Err(null("trace or out"));
        };
        let csv = match &t.0 {
            TraceInner::Up(t) => t.to_csv(),
            TraceInner::Down(t) => t.to_csv(),
        };
        unsafe { *out = CString::new(csv).expect("CSV has no nul bytes").into_raw() };
        Ok(Sp2Status::Ok)
    })
}

/// Null is ignored.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp2_trace_free(trace: *mut Sp2Trace) {
    if !trace.is_null() {
        drop(unsafe { Box::from_raw(trace) });
    }
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (Sp2Status, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

/// Runs a verification suite (`"prop2"`, `"theorem1"`, ..., `"all"`) on `"hopf"` or
/// `"gromoll-meyer"`. `samples == 0` uses the suite default. Writes the JSON report to
/// `json_out` (free with [`sp2_string_free`]) for both `SP2_STATUS_OK` and
/// `SP2_STATUS_CHECK_FAILED`.
///
/// # Safety
/// `suite` and `bundle` must be nul-terminated strings; `json_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp2_verify(
    suite: *const c_char,
    bundle: *const c_char,
    samples: usize,
    seed: u64,
    json_out: *mut *mut c_char,
) -> Sp2Status {
    guard(|| {
        if json_out.is_null() {
            return Err(null("json_out"));
        }
        let suite_name = unsafe { c_str(suite, "suite") }?;
        let bundle_name = unsafe { c_str(bundle, "bundle") }?;
        let suite: Suite = suite_name.parse().map_err(lib)?;
        let bundle = match bundle_name {
            "hopf" => ActionKind::Hopf,
            "gromoll-meyer" => ActionKind::GromollMeyer,
            other => return Err(invalid(format!("unknown bundle {other:?}"))),
        };
        let cfg = SuiteConfig {
            bundle,
            samples: (samples > 0).then_some(samples),
            seed,
            ..SuiteConfig::default()
        };
        let summary = suites::run(suite, &cfg).map_err(lib)?;
        let json = summary.to_json();
        unsafe { *json_out = CString::new(json).expect("JSON has no nul bytes").into_raw() };
        Ok(if summary.pass { Sp2Status::Ok } else { Sp2Status::CheckFailed })
    })
}
