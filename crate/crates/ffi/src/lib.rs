//! C ABI for `wassval`.
//!
//! Every function returns a [`WvStatus`]; results come back through out
//! pointers. On failure the message is available from [`wv_last_error`] on
//! the same thread until the next failing call. Handles are opaque and must
//! be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wassval::analytic::{beta_beta_w2, prajna_check, Interval, Verdict};
use wassval::certificates::{n_chernoff, n_worstcase};
use wassval::densities::{Cdf1D, DensityFamily, ParticleEnsemble};
use wassval::quadrature::QuadConfig;
use wassval::transport::{n_wass, w2_1d, w2_gaussian, w2_lp, SampleComplexityParams, TransportPlan};
use wassval::valctl::{run_validate, Report, ValidationConfig};
use wassval::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Unsupported = 4,
    Numerical = 5,
    Propagation = 6,
    Config = 7,
    Io = 8,
    Panic = 9,
}

impl From<&Error> for WvStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidArgument(_) => WvStatus::InvalidArgument,
            Error::DimensionMismatch { .. } => WvStatus::DimensionMismatch,
            Error::Unsupported(_) => WvStatus::Unsupported,
            Error::Quadrature(_)
            | Error::NotHurwitz(_)
            | Error::Singular(_)
            | Error::NonConvergence(_) => WvStatus::Numerical,
            Error::Propagation { .. } | Error::SampledDensity { .. } => WvStatus::Propagation,
            Error::Config { .. } | Error::Json(_) => WvStatus::Config,
            Error::Io(_) | Error::Csv(_) => WvStatus::Io,
        }
    }
}

/// Weighted point cloud.
pub struct WvEnsemble(ParticleEnsemble);

/// Optimal transport plan.
pub struct WvPlan(TransportPlan);

/// Result of a validation run.
pub struct WvReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F>(f: F) -> WvStatus
where
    F: FnOnce() -> Result<(), (WvStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WvStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            WvStatus::Panic
        }
    }
}

fn lib(e: Error) -> (WvStatus, String) {
    let s = WvStatus::from(&e);
    (s, format!("{}: {e}", e.code()))
}

fn null(what: &str) -> (WvStatus, String) {
    (WvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], (WvStatus, String)> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (WvStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (WvStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (WvStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (WvStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn wv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build an ensemble from `n` row-major points of dimension `dim`.
/// `weights` may be null for uniform weights.
///
/// # Safety
/// `points` must hold `n * dim` values and `weights`, if not null, `n`.
#[no_mangle]
pub unsafe extern "C" fn wv_ensemble_new(
    dim: usize,
    points: *const f64,
    n: usize,
    weights: *const f64,
    out_ens: *mut *mut WvEnsemble,
) -> WvStatus {
    guard(|| {
        let o = out(out_ens, "out_ens")?;
        let pts = slice(points, n.saturating_mul(dim), "points")?.to_vec();
        let w = if weights.is_null() {
            None
        } else {
            Some(slice(weights, n, "weights")?.to_vec())
        };
        let e = ParticleEnsemble::from_flat(dim, pts, w).map_err(lib)?;
        *o = Box::into_raw(Box::new(WvEnsemble(e)));
        Ok(())
    })
}

/// Read an ensemble CSV (`w,x1,...,xd`, weight column optional).
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wv_ensemble_read_csv(path: *const c_char, out_ens: *mut *mut WvEnsemble) -> WvStatus {
    guard(|| {
        let o = out(out_ens, "out_ens")?;
        let e = ParticleEnsemble::read_csv(text(path, "path")?).map_err(lib)?;
        *o = Box::into_raw(Box::new(WvEnsemble(e)));
        Ok(())
    })
}

/// # Safety
/// `ens` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wv_ensemble_free(ens: *mut WvEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}

/// # Safety
/// `ens` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wv_ensemble_len(ens: *const WvEnsemble, out_len: *mut usize) -> WvStatus {
    guard(|| {
        *out(out_len, "out_len")? = handle(ens, "ens")?.0.len();
        Ok(())
    })
}

/// # Safety
/// `ens` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wv_ensemble_dim(ens: *const WvEnsemble, out_dim: *mut usize) -> WvStatus {
    guard(|| {
        *out(out_dim, "out_dim")? = handle(ens, "ens")?.0.dim();
        Ok(())
    })
}

/// W2 between two ensembles by the transport LP. `out_plan` may be null.
///
/// # Safety
/// Handles must be live; out pointers valid or null where allowed.
#[no_mangle]
pub unsafe extern "C" fn wv_w2_lp(
    a: *const WvEnsemble,
    b: *const WvEnsemble,
    out_w2: *mut f64,
    out_plan: *mut *mut WvPlan,
) -> WvStatus {
    guard(|| {
        let o = out(out_w2, "out_w2")?;
        let (w, plan) = w2_lp(&handle(a, "a")?.0, &handle(b, "b")?.0).map_err(lib)?;
        *o = w;
        if let Some(p) = out_plan.as_mut() {
            *p = Box::into_raw(Box::new(WvPlan(plan)));
        }
        Ok(())
    })
}

/// 1-D W2 between two one-dimensional ensembles via quantiles.
///
/// # Safety
/// Handles must be live.
#[no_mangle]
pub unsafe extern "C" fn wv_w2_1d(a: *const WvEnsemble, b: *const WvEnsemble, out_w2: *mut f64) -> WvStatus {
    guard(|| {
        let o = out(out_w2, "out_w2")?;
        let f = Cdf1D::from_ensemble(&handle(a, "a")?.0).map_err(lib)?;
        let g = Cdf1D::from_ensemble(&handle(b, "b")?.0).map_err(lib)?;
        *o = w2_1d(&f, &g, &QuadConfig::default()).map_err(lib)?;
        Ok(())
    })
}

/// # Safety
/// `plan` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wv_plan_free(plan: *mut WvPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Number of positive-mass entries.
///
/// # Safety
/// `plan` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wv_plan_len(plan: *const WvPlan, out_len: *mut usize) -> WvStatus {
    guard(|| {
        *out(out_len, "out_len")? = handle(plan, "plan")?.0.entries.len();
        Ok(())
    })
}

/// Entry `idx` as `(i, j, mass)`.
///
/// # Safety
/// `plan` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wv_plan_entry(
    plan: *const WvPlan,
    idx: usize,
    out_i: *mut usize,
    out_j: *mut usize,
    out_mass: *mut f64,
) -> WvStatus {
    guard(|| {
        let p = &handle(plan, "plan")?.0;
        let &(i, j, m) = p
            .entries
            .get(idx)
            .ok_or_else(|| (WvStatus::InvalidArgument, format!("entry {idx} out of range")))?;
        *out(out_i, "out_i")? = i;
        *out(out_j, "out_j")? = j;
        *out(out_mass, "out_mass")? = m;
        Ok(())
    })
}

/// Gaussian closed form; covariances are `d x d` row-major.
///
/// # Safety
/// Means hold `d` values, covariances `d * d`.
#[no_mangle]
pub unsafe extern "C" fn wv_w2_gaussian(
    d: usize,
    m1: *const f64,
    cov1: *const f64,
    m2: *const f64,
    cov2: *const f64,
    out_w2: *mut f64,
) -> WvStatus {
    guard(|| {
        let o = out(out_w2, "out_w2")?;
        let rows = |p: *const f64, what| -> Result<Vec<Vec<f64>>, (WvStatus, String)> {
            Ok(slice(p, d * d, what)?.chunks(d.max(1)).map(|r| r.to_vec()).collect())
        };
        let g1 = DensityFamily::gaussian(slice(m1, d, "m1")?.to_vec(), rows(cov1, "cov1")?).map_err(lib)?;
        let g2 = DensityFamily::gaussian(slice(m2, d, "m2")?.to_vec(), rows(cov2, "cov2")?).map_err(lib)?;
        *o = w2_gaussian(&g1, &g2).map_err(lib)?;
        Ok(())
    })
}

/// W2 between `Beta(alpha, beta)` and `Beta(beta, alpha)`.
///
/// # Safety
/// `out_w2` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wv_beta_w2(alpha: f64, beta: f64, out_w2: *mut f64) -> WvStatus {
    guard(|| {
        *out(out_w2, "out_w2")? = beta_beta_w2(alpha, beta).map_err(lib)?;
        Ok(())
    })
}

/// # Safety
/// `out_n` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wv_n_chernoff(eps: f64, delta: f64, out_n: *mut u64) -> WvStatus {
    guard(|| {
        *out(out_n, "out_n")? = n_chernoff(eps, delta).map_err(lib)?;
        Ok(())
    })
}

/// # Safety
/// `out_n` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wv_n_worstcase(eps: f64, delta: f64, out_n: *mut u64) -> WvStatus {
    guard(|| {
        *out(out_n, "out_n")? = n_worstcase(eps, delta).map_err(lib)?;
        Ok(())
    })
}

/// # Safety
/// `out_n` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wv_n_wass(eps: f64, delta: f64, c: f64, k: f64, out_n: *mut u64) -> WvStatus {
    guard(|| {
        let p = SampleComplexityParams {
            epsilon: eps,
            delta,
            c,
            k,
        };
        *out(out_n, "out_n")? = n_wass(&p).map_err(lib)?;
        Ok(())
    })
}

/// Reachability check for `x' = -p x^3`; `out_invalidated` is 1 when the
/// model is invalidated.
///
/// # Safety
/// Out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wv_prajna_check(
    x0_lo: f64,
    x0_hi: f64,
    xt_lo: f64,
    xt_hi: f64,
    p_lo: f64,
    p_hi: f64,
    t: f64,
    out_witness: *mut f64,
    out_invalidated: *mut c_int,
) -> WvStatus {
    guard(|| {
        let w = out(out_witness, "out_witness")?;
        let v = out(out_invalidated, "out_invalidated")?;
        let iv = |a, b| Interval::new(a, b).map_err(lib);
        let r = prajna_check(iv(x0_lo, x0_hi)?, iv(xt_lo, xt_hi)?, iv(p_lo, p_hi)?, t).map_err(lib)?;
        *w = r.witness;
        *v = c_int::from(r.verdict == Verdict::Invalidated);
        Ok(())
    })
}

/// Run a validation from config JSON text. Relative data paths resolve
/// against the current directory.
///
/// # Safety
/// `config_json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wv_validate_json(config_json: *const c_char, out_report: *mut *mut WvReport) -> WvStatus {
    guard(|| {
        let o = out(out_report, "out_report")?;
        let cfg = ValidationConfig::from_json(text(config_json, "config_json")?).map_err(lib)?;
        let r = run_validate(&cfg, None).map_err(lib)?;
        *o = Box::into_raw(Box::new(WvReport(r)));
        Ok(())
    })
}

/// 1 if the report's hard invalidation check rejected the model.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wv_report_invalidated(report: *const WvReport, out_flag: *mut c_int) -> WvStatus {
    guard(|| {
        *out(out_flag, "out_flag")? = c_int::from(handle(report, "report")?.0.invalidated());
        Ok(())
    })
}

/// Report as JSON; release the string with [`wv_string_free`].
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wv_report_json(report: *const WvReport, out_json: *mut *mut c_char) -> WvStatus {
    guard(|| {
        let o = out(out_json, "out_json")?;
        let s = serde_json::to_string_pretty(&handle(report, "report")?.0).map_err(|e| lib(e.into()))?;
        *o = CString::new(s).map_err(|e| (WvStatus::Io, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wv_report_free(report: *mut WvReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
