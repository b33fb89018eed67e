//! C ABI over `rcm`.
//!
//! Models and samples are opaque heap handles released with the matching
//! `*_free` function. Every entry point returns an [`RcmStatus`]; on failure
//! [`rcm_last_error`] describes the most recent error on the calling thread.
//! Panics are caught at the boundary and reported as `RCM_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use rcm::analysis::{components, coupled_statistics, isolated_count};
use rcm::sampler::{couple_torus_to_square, sample_network, NetworkSample, SampleParams};
use rcm::theory::{chen_stein_terms, expected_isolated, ChenSteinParams};
use rcm::{ConnectionModel, Error, Metric};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RcmStatus {
    Ok = 0,
    NullPointer = 1,
    Parameter = 2,
    Model = 3,
    Numerical = 4,
    Io = 5,
    Parse = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RcmMetric {
    Torus = 0,
    Square = 1,
}

impl From<RcmMetric> for Metric {
    fn from(m: RcmMetric) -> Self {
        match m {
            RcmMetric::Torus => Metric::Torus,
            RcmMetric::Square => Metric::Square,
        }
    }
}

/// Isolated-node split of one coupled trial.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RcmCoupledCounts {
    pub n_points: usize,
    pub isolated_torus: usize,
    pub isolated_square: usize,
    pub isolated_boundary: usize,
}

/// Opaque connection model.
pub struct RcmModel(Arc<ConnectionModel>);

/// Opaque sampled network.
pub struct RcmSample(NetworkSample);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

enum Failure {
    Core(Error),
    Null(&'static str),
    Buffer(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(e: &Error) -> RcmStatus {
    match e {
        Error::Parameter(_) | Error::PointOutOfCell { .. } | Error::Config(_) => RcmStatus::Parameter,
        Error::Model(_) => RcmStatus::Model,
        Error::Divergent(_) | Error::Quadrature { .. } => RcmStatus::Numerical,
        Error::Io { .. } => RcmStatus::Io,
        Error::Parse(_) => RcmStatus::Parse,
    }
}

fn guard<F>(f: F) -> RcmStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RcmStatus::Ok,
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer passed for `{what}`"));
            RcmStatus::NullPointer
        }
        Ok(Err(Failure::Buffer(needed))) => {
            set_error(&format!("buffer too small: {needed} elements needed"));
            RcmStatus::BufferTooSmall
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {msg}"));
            RcmStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn in_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

fn boxed_model(out: *mut *mut RcmModel, build: impl FnOnce() -> rcm::Result<ConnectionModel>) -> RcmStatus {
    guard(|| {
        let slot = unsafe { out_ref(out, "out")? };
        *slot = ptr::null_mut();
        let model = build()?;
        *slot = Box::into_raw(Box::new(RcmModel(Arc::new(model))));
        Ok(())
    })
}

/// Message for the last failed call on this thread. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn rcm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn rcm_model_unit_disk(out: *mut *mut RcmModel) -> RcmStatus {
    boxed_model(out, || Ok(ConnectionModel::unit_disk()))
}

#[no_mangle]
pub unsafe extern "C" fn rcm_model_gaussian(out: *mut *mut RcmModel) -> RcmStatus {
    boxed_model(out, || Ok(ConnectionModel::gaussian()))
}

#[no_mangle]
pub unsafe extern "C" fn rcm_model_log_normal(
    sigma_db: f64,
    eta: f64,
    out: *mut *mut RcmModel,
) -> RcmStatus {
    boxed_model(out, || ConnectionModel::log_normal(sigma_db, eta))
}

/// Piecewise-linear kernel through `(radii[k], values[k])`, held constant
/// outside the knot range.
#[no_mangle]
pub unsafe extern "C" fn rcm_model_table(
    radii: *const f64,
    values: *const f64,
    n: usize,
    out: *mut *mut RcmModel,
) -> RcmStatus {
    if n > 0 && (radii.is_null() || values.is_null()) {
        set_error("null pointer passed for `radii` or `values`");
        return RcmStatus::NullPointer;
    }
    let knots: Vec<(f64, f64)> = if n == 0 {
        Vec::new()
    } else {
        let r = std::slice::from_raw_parts(radii, n);
        let v = std::slice::from_raw_parts(values, n);
        r.iter().copied().zip(v.iter().copied()).collect()
    };
    boxed_model(out, move || ConnectionModel::table(knots))
}

#[no_mangle]
pub unsafe extern "C" fn rcm_model_free(model: *mut RcmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// 1 when the kernel meets all model conditions, 0 otherwise.
#[no_mangle]
pub unsafe extern "C" fn rcm_model_is_usable(model: *const RcmModel, out: *mut i32) -> RcmStatus {
    guard(|| {
        let m = in_ref(model, "model")?;
        *out_ref(out, "out")? = m.0.is_usable() as i32;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rcm_model_eval(model: *const RcmModel, x: f64, out: *mut f64) -> RcmStatus {
    guard(|| {
        let m = in_ref(model, "model")?;
        *out_ref(out, "out")? = m.0.eval_g(x)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rcm_model_c(model: *const RcmModel, out: *mut f64) -> RcmStatus {
    guard(|| {
        let m = in_ref(model, "model")?;
        *out_ref(out, "out")? = m.0.integral_c()?.value;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rcm_model_cutoff(model: *const RcmModel, out: *mut f64) -> RcmStatus {
    guard(|| {
        let m = in_ref(model, "model")?;
        *out_ref(out, "out")? = m.0.cutoff();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rcm_connection_radius(c: f64, rho: f64, b: f64, out: *mut f64) -> RcmStatus {
    guard(|| {
        *out_ref(out, "out")? = rcm::connection_radius(c, rho, b)?;
        Ok(())
    })
}

/// Samples one trial: Poisson points plus independent edges.
#[no_mangle]
pub unsafe extern "C" fn rcm_sample(
    model: *const RcmModel,
    rho: f64,
    b: f64,
    metric: RcmMetric,
    master_seed: u64,
    trial_index: u64,
    out: *mut *mut RcmSample,
) -> RcmStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        *slot = ptr::null_mut();
        let m = in_ref(model, "model")?;
        let params = SampleParams::new(rho, b, m.0.clone(), metric.into(), master_seed, trial_index)?;
        let sample = sample_network(&params)?;
        *slot = Box::into_raw(Box::new(RcmSample(sample)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rcm_sample_free(sample: *mut RcmSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

#[no_mangle]
pub unsafe extern "C" fn rcm_sample_n_points(sample: *const RcmSample, out: *mut usize) -> RcmStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(sample, "sample")?.0.n_points();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rcm_sample_n_edges(sample: *const RcmSample, out: *mut usize) -> RcmStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(sample, "sample")?.0.edges.len();
        Ok(())
    })
}

/// Copies coordinates as `x0, y0, x1, y1, ...` into `xy`, which must hold
/// `2 * n_points` doubles.
#[no_mangle]
pub unsafe extern "C" fn rcm_sample_points(
    sample: *const RcmSample,
    xy: *mut f64,
    capacity: usize,
) -> RcmStatus {
    guard(|| {
        let s = &in_ref(sample, "sample")?.0;
        let needed = 2 * s.n_points();
        if capacity < needed {
            return Err(Failure::Buffer(needed));
        }
        if needed == 0 {
            return Ok(());
        }
        if xy.is_null() {
            return Err(Failure::Null("xy"));
        }
        let buf = std::slice::from_raw_parts_mut(xy, needed);
        for (k, p) in s.points.iter().enumerate() {
            buf[2 * k] = p.x();
            buf[2 * k + 1] = p.y();
        }
        Ok(())
    })
}

/// Copies edges as `i0, j0, i1, j1, ...` (sorted, `i < j`) into `ij`, which
/// must hold `2 * n_edges` entries.
#[no_mangle]
pub unsafe extern "C" fn rcm_sample_edges(
    sample: *const RcmSample,
    ij: *mut u32,
    capacity: usize,
) -> RcmStatus {
    guard(|| {
        let s = &in_ref(sample, "sample")?.0;
        let needed = 2 * s.edges.len();
        if capacity < needed {
            return Err(Failure::Buffer(needed));
        }
        if needed == 0 {
            return Ok(());
        }
        if ij.is_null() {
            return Err(Failure::Null("ij"));
        }
        let buf = std::slice::from_raw_parts_mut(ij, needed);
        for (k, &(i, j)) in s.edges.iter().enumerate() {
            buf[2 * k] = i;
            buf[2 * k + 1] = j;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rcm_sample_isolated_count(sample: *const RcmSample, out: *mut usize) -> RcmStatus {
    guard(|| {
        *out_ref(out, "out")? = isolated_count(&in_ref(sample, "sample")?.0);
        Ok(())
    })
}

/// Number of connected components and whether the graph is connected
/// (graphs with at most one node count as connected).
#[no_mangle]
pub unsafe extern "C" fn rcm_sample_components(
    sample: *const RcmSample,
    n_components: *mut usize,
    connected: *mut i32,
) -> RcmStatus {
    guard(|| {
        let (k, c) = components(&in_ref(sample, "sample")?.0);
        *out_ref(n_components, "n_components")? = k;
        *out_ref(connected, "connected")? = c as i32;
        Ok(())
    })
}

/// Finite-density expected number of isolated nodes with its quadrature
/// error estimate. `abs_error` may be null.
#[no_mangle]
pub unsafe extern "C" fn rcm_expected_isolated(
    model: *const RcmModel,
    rho: f64,
    b: f64,
    metric: RcmMetric,
    value: *mut f64,
    abs_error: *mut f64,
) -> RcmStatus {
    guard(|| {
        let m = in_ref(model, "model")?;
        let slot = out_ref(value, "value")?;
        let est = expected_isolated(&m.0, rho, b, metric.into())?;
        *slot = est.value;
        if let Some(e) = abs_error.as_mut() {
            *e = est.abs_error;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rcm_chen_stein_terms(
    model: *const RcmModel,
    rho: f64,
    b: f64,
    epsilon: f64,
    b1: *mut f64,
    b2: *mut f64,
) -> RcmStatus {
    guard(|| {
        let m = in_ref(model, "model")?;
        let (o1, o2) = (out_ref(b1, "b1")?, out_ref(b2, "b2")?);
        let params = ChenSteinParams::new(epsilon)?;
        let t = chen_stein_terms(&m.0, rho, b, &params)?;
        *o1 = t.b1;
        *o2 = t.b2;
        Ok(())
    })
}

/// One coupled trial: torus graph, thinned to the square graph on the same
/// points.
#[no_mangle]
pub unsafe extern "C" fn rcm_coupled_trial(
    model: *const RcmModel,
    rho: f64,
    b: f64,
    master_seed: u64,
    trial_index: u64,
    out: *mut RcmCoupledCounts,
) -> RcmStatus {
    guard(|| {
        let m = in_ref(model, "model")?;
        let slot = out_ref(out, "out")?;
        let params = SampleParams::new(rho, b, m.0.clone(), Metric::Square, master_seed, trial_index)?;
        let rec = coupled_statistics(&couple_torus_to_square(&params)?);
        *slot = RcmCoupledCounts {
            n_points: rec.n_points,
            isolated_torus: rec.isolated_torus.unwrap_or_default(),
            isolated_square: rec.isolated_square.unwrap_or_default(),
            isolated_boundary: rec.isolated_boundary.unwrap_or_default(),
        };
        Ok(())
    })
}

/// Version string of the library, static storage.
#[no_mangle]
pub extern "C" fn rcm_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}
