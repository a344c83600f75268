//! C ABI over the `spdetect` library.
//!
//! Every fallible function returns an [`SpdStatus`]; on failure a message is
//! available from [`spd_last_error`] on the same thread. Matrices and samples
//! are opaque handles released with their `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use spdetect::detection::{thresholds_for, TestConfig};
use spdetect::matrix::{largest_eigenvalue, DataMatrix, SymMatrix, ASYMMETRY_TOL};
use spdetect::models::ModelSpec;
use spdetect::rng::Seed;
use spdetect::stats::{self, SdpSolverConfig, StatKind, StatValue, StepRule};
use spdetect::{empirical_covariance, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    NonFinite = 4,
    BudgetExceeded = 5,
    /// The SDP solver stopped early; the certified interval is still filled in.
    NotConverged = 6,
    Parse = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpdStatKind {
    LambdaK = 0,
    Sdp = 1,
    Mdp = 2,
    Diag = 3,
}

impl From<SpdStatKind> for StatKind {
    fn from(k: SpdStatKind) -> Self {
        match k {
            SpdStatKind::LambdaK => StatKind::LambdaK,
            SpdStatKind::Sdp => StatKind::Sdp,
            SpdStatKind::Mdp => StatKind::Mdp,
            SpdStatKind::Diag => StatKind::Diag,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpdStepRule {
    Fixed = 0,
    Backtracking = 1,
}

/// Symmetric matrix handle.
pub struct SpdMatrix(SymMatrix);

/// Sample handle: `n` rows of `p` coordinates.
pub struct SpdData(DataMatrix);

/// Statistic value; absent by-products are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdStatValue {
    pub value: f64,
    pub lower_cert: f64,
    pub upper_cert: f64,
    pub z_star: f64,
    pub iterations: usize,
}

impl From<&StatValue> for SpdStatValue {
    fn from(s: &StatValue) -> Self {
        SpdStatValue {
            value: s.value,
            lower_cert: s.lower_cert.unwrap_or(f64::NAN),
            upper_cert: s.upper_cert.unwrap_or(f64::NAN),
            z_star: s.z_star.unwrap_or(f64::NAN),
            iterations: s.iterations,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdThresholds {
    pub tau0: f64,
    pub tau1: f64,
    pub theta_bar: f64,
    pub feasible: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SpdStatus {
    match e {
        Error::EmptySample | Error::InvalidArgument(_) => SpdStatus::InvalidArgument,
        Error::Dimension(_) | Error::IndexOutOfRange { .. } => SpdStatus::Dimension,
        Error::NonFinite(_) => SpdStatus::NonFinite,
        Error::BudgetExceeded { .. } => SpdStatus::BudgetExceeded,
        Error::NotConverged { .. } => SpdStatus::NotConverged,
        Error::Parse { .. } => SpdStatus::Parse,
        Error::Io(_) => SpdStatus::Io,
    }
}

fn fail(e: Error) -> SpdStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null_pointer(what: &str) -> SpdStatus {
    set_error(&format!("{what} is null"));
    SpdStatus::NullPointer
}

/// Runs `f`, turning panics into [`SpdStatus::Panic`].
fn guard(f: impl FnOnce() -> SpdStatus) -> SpdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == SpdStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => {
            set_error("internal panic");
            SpdStatus::Panic
        }
    }
}

/// Message of the last failure on this thread, or an empty string. Valid
/// until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn spd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn spd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn boxed<T>(value: T, out: *mut *mut T) -> SpdStatus {
    // SAFETY: callers check `out` for null before building the value
    unsafe { *out = Box::into_raw(Box::new(value)) };
    SpdStatus::Ok
}

/// Builds a matrix from `p * p` row-major values, which must be symmetric.
///
/// # Safety
/// `values` points to `p * p` readable doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_matrix_from_dense(
    p: usize,
    values: *const f64,
    out: *mut *mut SpdMatrix,
) -> SpdStatus {
    guard(|| {
        if values.is_null() || out.is_null() {
            return null_pointer("values or out");
        }
        let Some(len) = p.checked_mul(p) else {
            return fail(Error::InvalidArgument("p * p overflows".into()));
        };
        let dense = slice::from_raw_parts(values, len);
        match SymMatrix::from_dense(p, dense, ASYMMETRY_TOL) {
            Ok(m) => boxed(SpdMatrix(m), out),
            Err(e) => fail(e),
        }
    })
}

/// The `p x p` identity.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_matrix_identity(p: usize, out: *mut *mut SpdMatrix) -> SpdStatus {
    guard(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        boxed(SpdMatrix(SymMatrix::identity(p)), out)
    })
}

/// Releases a matrix; null is ignored.
///
/// # Safety
/// `m` comes from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spd_matrix_free(m: *mut SpdMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of `m`, or 0 for null.
///
/// # Safety
/// `m` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spd_matrix_dim(m: *const SpdMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Entry `(i, j)`.
///
/// # Safety
/// `m` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_matrix_get(
    m: *const SpdMatrix,
    i: usize,
    j: usize,
    out: *mut f64,
) -> SpdStatus {
    guard(|| {
        let (Some(m), false) = (m.as_ref(), out.is_null()) else {
            return null_pointer("matrix or out");
        };
        let p = m.0.dim();
        if i >= p || j >= p {
            return fail(Error::IndexOutOfRange { index: i.max(j), dim: p });
        }
        *out = m.0.get(i, j);
        SpdStatus::Ok
    })
}

/// Wraps `n * p` row-major values as a sample.
///
/// # Safety
/// `values` points to `n * p` readable doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_data_new(
    n: usize,
    p: usize,
    values: *const f64,
    out: *mut *mut SpdData,
) -> SpdStatus {
    guard(|| {
        if values.is_null() || out.is_null() {
            return null_pointer("values or out");
        }
        let Some(len) = n.checked_mul(p) else {
            return fail(Error::InvalidArgument("n * p overflows".into()));
        };
        match DataMatrix::new(n, p, slice::from_raw_parts(values, len).to_vec()) {
            Ok(d) => boxed(SpdData(d), out),
            Err(e) => fail(e),
        }
    })
}

/// Releases a sample; null is ignored.
///
/// # Safety
/// `d` comes from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spd_data_free(d: *mut SpdData) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of rows and columns of `d`.
///
/// # Safety
/// `d` is a live handle; `n` and `p` are writable.
#[no_mangle]
pub unsafe extern "C" fn spd_data_shape(d: *const SpdData, n: *mut usize, p: *mut usize) -> SpdStatus {
    guard(|| {
        let (Some(d), false, false) = (d.as_ref(), n.is_null(), p.is_null()) else {
            return null_pointer("data, n or p");
        };
        *n = d.0.n();
        *p = d.0.p();
        SpdStatus::Ok
    })
}

/// Copies the row-major values of `d` into `buf`, which holds `len` doubles.
///
/// # Safety
/// `d` is a live handle; `buf` has room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn spd_data_copy(d: *const SpdData, buf: *mut f64, len: usize) -> SpdStatus {
    guard(|| {
        let (Some(d), false) = (d.as_ref(), buf.is_null()) else {
            return null_pointer("data or buf");
        };
        let src = d.0.as_slice();
        if len < src.len() {
            return fail(Error::Dimension(format!("buffer holds {len} values, need {}", src.len())));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
        SpdStatus::Ok
    })
}

/// Empirical covariance `(1/n) X^T X`.
///
/// # Safety
/// `d` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_covariance(d: *const SpdData, out: *mut *mut SpdMatrix) -> SpdStatus {
    guard(|| {
        let (Some(d), false) = (d.as_ref(), out.is_null()) else {
            return null_pointer("data or out");
        };
        match empirical_covariance(&d.0) {
            Ok(m) => boxed(SpdMatrix(m), out),
            Err(e) => fail(e),
        }
    })
}

/// Largest eigenvalue of `m` to relative tolerance `tol`.
///
/// # Safety
/// `m` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_largest_eigenvalue(m: *const SpdMatrix, tol: f64, out: *mut f64) -> SpdStatus {
    guard(|| {
        let (Some(m), false) = (m.as_ref(), out.is_null()) else {
            return null_pointer("matrix or out");
        };
        match largest_eigenvalue(&m.0, tol) {
            Ok(e) => {
                *out = e.value;
                SpdStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

unsafe fn finish_stat(r: spdetect::Result<StatValue>, out: *mut SpdStatValue) -> SpdStatus {
    match r {
        Ok(s) => {
            *out = SpdStatValue::from(&s);
            SpdStatus::Ok
        }
        Err(Error::NotConverged { lower, upper, iterations }) => {
            *out = SpdStatValue {
                value: upper,
                lower_cert: lower,
                upper_cert: upper,
                z_star: f64::NAN,
                iterations,
            };
            fail(Error::NotConverged { lower, upper, iterations })
        }
        Err(e) => fail(e),
    }
}

/// Exhaustive k-sparse largest eigenvalue. When `support` is not null it
/// receives the `k` indices (0-based) of the attaining subset.
///
/// # Safety
/// `m` is a live handle; `out` is writable; `support` is null or has room
/// for `k` values.
#[no_mangle]
pub unsafe extern "C" fn spd_lambda_k(
    m: *const SpdMatrix,
    k: usize,
    budget: u64,
    out: *mut SpdStatValue,
    support: *mut usize,
) -> SpdStatus {
    guard(|| {
        let (Some(m), false) = (m.as_ref(), out.is_null()) else {
            return null_pointer("matrix or out");
        };
        let r = stats::lambda_k_max_with_budget(&m.0, k, budget as u128);
        if let (Ok(s), false) = (&r, support.is_null()) {
            if let Some(sup) = &s.support {
                ptr::copy_nonoverlapping(sup.as_ptr(), support, sup.len().min(k));
            }
        }
        finish_stat(r, out)
    })
}

/// Minimum dual perturbation over a `grid_size`-point threshold grid.
///
/// # Safety
/// `m` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_mdp(
    m: *const SpdMatrix,
    k: usize,
    grid_size: usize,
    out: *mut SpdStatValue,
) -> SpdStatus {
    guard(|| {
        let (Some(m), false) = (m.as_ref(), out.is_null()) else {
            return null_pointer("matrix or out");
        };
        finish_stat(stats::mdp(&m.0, k, grid_size), out)
    })
}

/// Semidefinite relaxation with a certified interval of half-width `eps`.
/// On [`SpdStatus::NotConverged`] the interval reached is still written.
///
/// # Safety
/// `m` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_sdp(
    m: *const SpdMatrix,
    k: usize,
    eps: f64,
    max_outer: usize,
    max_inner: usize,
    step_rule: SpdStepRule,
    out: *mut SpdStatValue,
) -> SpdStatus {
    guard(|| {
        let (Some(m), false) = (m.as_ref(), out.is_null()) else {
            return null_pointer("matrix or out");
        };
        let cfg = SdpSolverConfig {
            eps,
            max_outer,
            max_inner,
            step_rule: match step_rule {
                SpdStepRule::Fixed => StepRule::Fixed,
                SpdStepRule::Backtracking => StepRule::Backtracking,
            },
        };
        finish_stat(stats::sdp(&m.0, k, &cfg), out)
    })
}

/// Largest diagonal entry.
///
/// # Safety
/// `m` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_diag(m: *const SpdMatrix, out: *mut SpdStatValue) -> SpdStatus {
    guard(|| {
        let (Some(m), false) = (m.as_ref(), out.is_null()) else {
            return null_pointer("matrix or out");
        };
        finish_stat(Ok(stats::diag_stat(&m.0)), out)
    })
}

/// Closed-form null and alternative quantiles of `stat`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_thresholds(
    p: usize,
    n: usize,
    k: usize,
    delta: f64,
    theta: f64,
    stat: SpdStatKind,
    out: *mut SpdThresholds,
) -> SpdStatus {
    guard(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        let cfg = TestConfig {
            p,
            n,
            k,
            delta,
            theta,
            statistic: stat.into(),
        };
        match cfg.validate().and_then(|_| thresholds_for(&cfg)) {
            Ok(t) => {
                *out = SpdThresholds {
                    tau0: t.tau0,
                    tau1: t.tau1,
                    theta_bar: t.theta_bar,
                    feasible: t.feasible,
                };
                SpdStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

unsafe fn parse_spec(spec: *const c_char) -> Result<ModelSpec, SpdStatus> {
    if spec.is_null() {
        return Err(null_pointer("model spec"));
    }
    let s = CStr::from_ptr(spec)
        .to_str()
        .map_err(|_| fail(Error::InvalidArgument("model spec is not UTF-8".into())))?;
    s.parse::<ModelSpec>().map_err(fail)
}

/// Draws data from a model given as `kind:key=value,...` or JSON, e.g.
/// `spiked:p=50,n=100,k=5,theta=2`.
///
/// # Safety
/// `spec` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_sample_model(
    spec: *const c_char,
    seed: u64,
    out: *mut *mut SpdData,
) -> SpdStatus {
    guard(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        let model = match parse_spec(spec) {
            Ok(m) => m,
            Err(s) => return s,
        };
        match model.sample(Seed::new(seed, 0)) {
            Ok(d) => boxed(SpdData(d), out),
            Err(e) => fail(e),
        }
    })
}

/// The matrix a statistic would be evaluated on for `spec` and `seed`:
/// the empirical covariance of a draw, or the adversarial matrix.
///
/// # Safety
/// `spec` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn spd_model_covariance(
    spec: *const c_char,
    seed: u64,
    out: *mut *mut SpdMatrix,
) -> SpdStatus {
    guard(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        let model = match parse_spec(spec) {
            Ok(m) => m,
            Err(s) => return s,
        };
        match model.covariance(Seed::new(seed, 0)) {
            Ok(m) => boxed(SpdMatrix(m), out),
            Err(e) => fail(e),
        }
    })
}
