//! C ABI for the locstat library.
//!
//! Every function returns a [`LocstatStatus`]; results go through out
//! pointers. After a non-zero status, [`locstat_last_error`] returns a message
//! for the calling thread. Models are opaque handles created with
//! [`locstat_model_new`] and released with [`locstat_model_free`].
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the documented number of
//! reads or writes, strings must be NUL-terminated UTF-8, and model handles
//! must come from `locstat_model_new` and be freed exactly once.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use locstat::harness::{run_study, write_study, StudyConfig};
use locstat::kalman::{qmle_estimate, KalmanSteady};
use locstat::kernels::KernelKind;
use locstat::optimize::DeConfig;
use locstat::ou_lse::{lse_asymp_variance, lse_estimate};
use locstat::simulate::{SamplingGrid, Scheme, Window};
use locstat::statespace::{FamilyId, ModelFamily, SampledModel};
use locstat::whittle::whittle_estimate;
use locstat::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocstatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 10,
    Parameter = 11,
    Config = 12,
    Range = 13,
    Kernel = 14,
    Estimation = 20,
    Numeric = 21,
    Degenerate = 22,
    Optimization = 23,
    Io = 30,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocstatKernel {
    Rectangular = 0,
    Epanechnikov = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocstatScheme {
    O1 = 0,
    O2 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocstatFamily {
    Example2d = 0,
    Car1 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocstatEstimator {
    Qmle = 0,
    Whittle = 1,
}

/// Sampling grid description passed by value.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LocstatGrid {
    pub n: u32,
    pub delta_n: f64,
    pub bandwidth: f64,
    pub u: f64,
    pub lag: f64,
    pub scheme: LocstatScheme,
}

/// Sampled state space model at one parameter value.
pub struct LocstatModel {
    family: Box<dyn ModelFamily>,
    theta: Vec<f64>,
    sampled: SampledModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> LocstatStatus {
    match e {
        Error::Domain(_) => LocstatStatus::Domain,
        Error::Parameter(_) => LocstatStatus::Parameter,
        Error::Config(_) => LocstatStatus::Config,
        Error::Range(_) => LocstatStatus::Range,
        Error::Kernel(_) => LocstatStatus::Kernel,
        Error::Estimation(_) => LocstatStatus::Estimation,
        Error::Numeric(_) => LocstatStatus::Numeric,
        Error::Degenerate(_) => LocstatStatus::Degenerate,
        Error::Optimization(_) => LocstatStatus::Optimization,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => LocstatStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type FfiResult = Result<(), Failure>;

fn guard<F: FnOnce() -> FfiResult>(f: F) -> LocstatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LocstatStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            LocstatStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_error(&msg);
            LocstatStatus::InvalidArgument
        }
        Err(_) => {
            set_error("internal panic");
            LocstatStatus::Panic
        }
    }
}

fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller guarantees `p` is either null or valid for writes
    unsafe { p.as_mut() }.ok_or(Failure::Null(what))
}

fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: non-null and the caller guarantees `len` readable elements
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: non-null, NUL-terminated per the API contract
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure::Invalid(format!("{what} is not valid UTF-8")))
}

fn kernel(k: LocstatKernel) -> KernelKind {
    match k {
        LocstatKernel::Rectangular => KernelKind::Rectangular,
        LocstatKernel::Epanechnikov => KernelKind::Epanechnikov,
    }
}

fn scheme(s: LocstatScheme) -> Scheme {
    match s {
        LocstatScheme::O1 => Scheme::O1,
        LocstatScheme::O2 => Scheme::O2,
    }
}

fn family(f: LocstatFamily) -> FamilyId {
    match f {
        LocstatFamily::Example2d => FamilyId::Example2d,
        LocstatFamily::Car1 => FamilyId::Car1,
    }
}

fn window(grid: &LocstatGrid, values: *const f64, len: usize) -> Result<Window, Failure> {
    let g = SamplingGrid::new(grid.n, grid.delta_n, grid.bandwidth, grid.u, grid.lag, scheme(grid.scheme))?;
    if len != g.len() {
        return Err(Failure::Invalid(format!("window needs {} observations, got {len}", g.len())));
    }
    Ok(Window::new(g, slice(values, len, "values")?.to_vec())?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn locstat_version() -> *const c_char {
    static VERSION: std::sync::OnceLock<CString> = std::sync::OnceLock::new();
    VERSION
        .get_or_init(|| CString::new(locstat::harness::output::VERSION).unwrap_or_default())
        .as_ptr()
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn locstat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Kernel value `K(x)`.
#[no_mangle]
pub unsafe extern "C" fn locstat_kernel_eval(k: LocstatKernel, x: f64, result: *mut f64) -> LocstatStatus {
    guard(|| {
        *out(result, "result")? = kernel(k).eval(x)?;
        Ok(())
    })
}

/// Asymptotic variance of the least squares estimator.
#[no_mangle]
pub unsafe extern "C" fn locstat_lse_asymp_variance(
    a: f64,
    lag: f64,
    delta: f64,
    s: LocstatScheme,
    result: *mut f64,
) -> LocstatStatus {
    guard(|| {
        *out(result, "result")? = lse_asymp_variance(a, lag, delta, scheme(s))?;
        Ok(())
    })
}

/// Least squares estimate of `a(u)` from `len = 2m + 1` observations.
#[no_mangle]
pub unsafe extern "C" fn locstat_lse_estimate(
    grid: LocstatGrid,
    values: *const f64,
    len: usize,
    k: LocstatKernel,
    lo: f64,
    hi: f64,
    a_hat: *mut f64,
    sigma_hat: *mut f64,
) -> LocstatStatus {
    guard(|| {
        let w = window(&grid, values, len)?;
        let est = lse_estimate(&w, kernel(k), (lo, hi))?;
        *out(a_hat, "a_hat")? = est.a_hat;
        if !sigma_hat.is_null() {
            *out(sigma_hat, "sigma_hat")? = est.sigma_u_hat;
        }
        Ok(())
    })
}

/// Sampled model of a built-in family at `theta` for observation spacing `delta`.
#[no_mangle]
pub unsafe extern "C" fn locstat_model_new(
    f: LocstatFamily,
    theta: *const f64,
    theta_len: usize,
    delta: f64,
    model: *mut *mut LocstatModel,
) -> LocstatStatus {
    guard(|| {
        let slot = out(model, "model")?;
        *slot = ptr::null_mut();
        let fam = family(f).build(None)?;
        let th = slice(theta, theta_len, "theta")?;
        if th.len() != fam.param_dim() {
            return Err(Failure::Invalid(format!("{} needs {} parameters, got {}", fam.name(), fam.param_dim(), th.len())));
        }
        let sampled = SampledModel::from_family(fam.as_ref(), th, delta)?;
        *slot = Box::into_raw(Box::new(LocstatModel { family: fam, theta: th.to_vec(), sampled }));
        Ok(())
    })
}

/// Releases a model; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn locstat_model_free(model: *mut LocstatModel) {
    if !model.is_null() {
        // SAFETY: created by `locstat_model_new` and not freed before
        drop(unsafe { Box::from_raw(model) });
    }
}

fn model_ref<'a>(model: *const LocstatModel) -> Result<&'a LocstatModel, Failure> {
    // SAFETY: the caller passes a live handle or null
    unsafe { model.as_ref() }.ok_or(Failure::Null("model"))
}

#[no_mangle]
pub unsafe extern "C" fn locstat_model_state_dim(model: *const LocstatModel, dim: *mut usize) -> LocstatStatus {
    guard(|| {
        *out(dim, "dim")? = model_ref(model)?.sampled.dim();
        Ok(())
    })
}

/// Spectral density of the sampled output at frequency `omega`.
#[no_mangle]
pub unsafe extern "C" fn locstat_model_spectral_density(model: *const LocstatModel, omega: f64, result: *mut f64) -> LocstatStatus {
    guard(|| {
        *out(result, "result")? = model_ref(model)?.sampled.spectral_density(omega)?;
        Ok(())
    })
}

/// Spectral density of the continuous-time output at frequency `omega`.
#[no_mangle]
pub unsafe extern "C" fn locstat_model_continuous_density(
    model: *const LocstatModel,
    omega: f64,
    result: *mut f64,
) -> LocstatStatus {
    guard(|| {
        let m = model_ref(model)?;
        *out(result, "result")? = locstat::statespace::spectral_density_continuous(m.family.as_ref(), &m.theta, omega)?;
        Ok(())
    })
}

/// Steady-state Kalman filter: innovation variance, Riccati residual and the
/// gain (written to `gain`, which must hold `state_dim` values; may be null).
#[no_mangle]
pub unsafe extern "C" fn locstat_model_kalman(
    model: *const LocstatModel,
    v: *mut f64,
    residual: *mut f64,
    gain: *mut f64,
    gain_len: usize,
) -> LocstatStatus {
    guard(|| {
        let m = model_ref(model)?;
        let ks = KalmanSteady::for_model(&m.sampled)?;
        *out(v, "v")? = ks.v;
        if !residual.is_null() {
            *out(residual, "residual")? = ks.residual;
        }
        if !gain.is_null() {
            if gain_len < ks.k.len() {
                return Err(Failure::Invalid(format!("gain buffer holds {gain_len} values, need {}", ks.k.len())));
            }
            // SAFETY: non-null with at least `gain_len` writable elements
            let g = unsafe { std::slice::from_raw_parts_mut(gain, gain_len) };
            g[..ks.k.len()].copy_from_slice(ks.k.as_slice());
        }
        Ok(())
    })
}

/// QML or Whittle estimate over the family's default box. `theta_hat` must
/// hold the family's parameter dimension.
#[no_mangle]
pub unsafe extern "C" fn locstat_statespace_estimate(
    estimator: LocstatEstimator,
    f: LocstatFamily,
    grid: LocstatGrid,
    values: *const f64,
    len: usize,
    k: LocstatKernel,
    max_gens: usize,
    seed: u64,
    theta_hat: *mut f64,
    theta_len: usize,
    objective: *mut f64,
) -> LocstatStatus {
    guard(|| {
        let fam = family(f).build(None)?;
        let d = fam.param_dim();
        if theta_hat.is_null() {
            return Err(Failure::Null("theta_hat"));
        }
        if theta_len < d {
            return Err(Failure::Invalid(format!("theta_hat holds {theta_len} values, need {d}")));
        }
        let w = window(&grid, values, len)?;
        let de = DeConfig { max_gens, seed, parallel: false, ..DeConfig::default() };
        let est = match estimator {
            LocstatEstimator::Qmle => qmle_estimate(&w, kernel(k), fam.as_ref(), &de)?,
            LocstatEstimator::Whittle => whittle_estimate(&w, kernel(k), fam.as_ref(), &de)?.estimate,
        };
        // SAFETY: non-null with at least `theta_len >= d` writable elements
        let t = unsafe { std::slice::from_raw_parts_mut(theta_hat, theta_len) };
        t[..d].copy_from_slice(&est.theta_hat);
        if !objective.is_null() {
            *out(objective, "objective")? = est.objective;
        }
        Ok(())
    })
}

/// Runs a Monte Carlo study from a JSON configuration and writes its output
/// files into `out_dir`.
#[no_mangle]
pub unsafe extern "C" fn locstat_study_run(config_json: *const c_char, out_dir: *const c_char) -> LocstatStatus {
    guard(|| {
        let cfg = StudyConfig::from_json_str(string(config_json, "config_json")?)?;
        let dir = string(out_dir, "out_dir")?;
        let res = run_study(&cfg)?;
        write_study(&res, Path::new(dir))?;
        Ok(())
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_follow_error_kind() {
        assert_eq!(status_of(&Error::Config("x".into())), LocstatStatus::Config);
        assert_eq!(status_of(&Error::Degenerate(-1.0)), LocstatStatus::Degenerate);
        assert_eq!(status_of(&Error::Numeric("x".into())), LocstatStatus::Numeric);
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), LocstatStatus::Panic);
        assert_eq!(guard(|| Ok(())), LocstatStatus::Ok);
    }
}
