//! C ABI for the `fswe` solver.
//!
//! Every function returns an [`FsweStatus`]; results travel through out
//! pointers. Configurations and error tables are opaque heap handles owned by
//! the caller and released with the matching `_free`. After a non-OK status,
//! `fswe_last_error_message` copies a description of the failure for the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fswe::config::parse_config;
use fswe::experiments::{kappa_label, strong_errors, ErrorTable, ExperimentConfig, Harness};
use fswe::stepper::{SchemeConfig, Stepper};
use fswe::{fbm_covariance, Error, HurstParameter};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsweStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    /// Covariance factorisation failed or the solution left the finite range.
    Numerical = 4,
    /// Caller buffer has the wrong length.
    BufferSize = 5,
    /// Internal panic; the handle arguments are unchanged.
    Panic = 6,
}

/// Opaque experiment configuration.
pub struct FsweConfig {
    inner: ExperimentConfig,
}

/// Opaque strong-error table.
pub struct FsweErrorTable {
    inner: ErrorTable,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> FsweStatus {
    match e {
        Error::Config(_) => FsweStatus::InvalidConfig,
        Error::Argument(_) | Error::NegativeTime(_) | Error::GridMismatch(_) => FsweStatus::InvalidArgument,
        Error::IllConditionedCovariance { .. } => FsweStatus::Numerical,
        Error::Trajectory { source, .. } => status_of(source),
    }
}

fn fail(e: Error) -> FsweStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> FsweStatus {
    set_error(format!("{what} is null"));
    FsweStatus::NullPointer
}

fn guard(f: impl FnOnce() -> FsweStatus) -> FsweStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == FsweStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FsweStatus::Panic
        }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fswe_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn fswe_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// E[B(s)B(t)] for fractional Brownian motion with Hurst index `h`.
///
/// # Safety
/// `out` must be null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fswe_fbm_covariance(s: f64, t: f64, h: f64, out: *mut f64) -> FsweStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match HurstParameter::new(h).and_then(|h| fbm_covariance(s, t, h)) {
            Ok(c) => {
                *out = c;
                FsweStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Regularity label κ and predicted strong rate for (α, H, σ).
///
/// # Safety
/// `kappa` and `rate` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fswe_kappa_label(
    alpha: f64,
    hurst: f64,
    sigma: f64,
    kappa: *mut f64,
    rate: *mut f64,
) -> FsweStatus {
    guard(|| {
        if kappa.is_null() || rate.is_null() {
            return null("kappa or rate");
        }
        if !(alpha > 0.0 && alpha <= 1.0 && hurst > 0.0 && hurst < 1.0 && sigma.is_finite()) {
            set_error(format!("need alpha in (0, 1], hurst in (0, 1); got {alpha}, {hurst}"));
            return FsweStatus::InvalidArgument;
        }
        let k = kappa_label(alpha, hurst, sigma);
        *kappa = k.kappa;
        *rate = k.predicted_rate;
        FsweStatus::Ok
    })
}

fn boxed_config(cfg: ExperimentConfig, out: *mut *mut FsweConfig) -> FsweStatus {
    match cfg.validate() {
        Ok(()) => {
            // SAFETY: callers check `out` for null
            unsafe { *out = Box::into_raw(Box::new(FsweConfig { inner: cfg })) };
            FsweStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Parses `key = value` configuration text into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fswe_config_parse(text: *const c_char, out: *mut *mut FsweConfig) -> FsweStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return null("text or out");
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            set_error("configuration text is not UTF-8");
            return FsweStatus::InvalidArgument;
        };
        match parse_config(text) {
            Ok(cfg) => boxed_config(cfg, out),
            Err(e) => fail(e),
        }
    })
}

/// Reference problem: T = 0.2, steps 4..32, u0 = 0.25 φ1, v0 = 0.5 φ3 and the
/// default drift, with mode count and trajectory count given explicitly.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fswe_config_reference(
    alpha: f64,
    hurst: f64,
    sigma: f64,
    modes: usize,
    trajectories: usize,
    out: *mut *mut FsweConfig,
) -> FsweStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let cfg = ExperimentConfig { modes, trajectories, ..ExperimentConfig::reference_problem(alpha, hurst, sigma) };
        boxed_config(cfg, out)
    })
}

/// Overrides the base seed.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fswe_config_set_seed(config: *mut FsweConfig, seed: u64) -> FsweStatus {
    guard(|| match config.as_mut() {
        Some(c) => {
            c.inner.base_seed = seed;
            FsweStatus::Ok
        }
        None => null("config"),
    })
}

/// Sets the worker count; 0 means one per core. Results do not depend on it.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fswe_config_set_workers(config: *mut FsweConfig, workers: usize) -> FsweStatus {
    guard(|| match config.as_mut() {
        Some(c) => {
            c.inner.workers = (workers > 0).then_some(workers);
            FsweStatus::Ok
        }
        None => null("config"),
    })
}

/// Number of spectral modes in the configuration.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fswe_config_modes(config: *const FsweConfig, out: *mut usize) -> FsweStatus {
    guard(|| match (config.as_ref(), out.is_null()) {
        (Some(c), false) => {
            *out = c.inner.modes;
            FsweStatus::Ok
        }
        _ => null("config or out"),
    })
}

/// # Safety
/// `config` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fswe_config_free(config: *mut FsweConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the Monte Carlo strong-error estimate for `config`.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fswe_strong_errors(config: *const FsweConfig, out: *mut *mut FsweErrorTable) -> FsweStatus {
    guard(|| {
        let Some(c) = config.as_ref() else { return null("config") };
        if out.is_null() {
            return null("out");
        }
        match strong_errors(&c.inner) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(FsweErrorTable { inner: t }));
                FsweStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of rows (every level except the finest).
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fswe_table_len(table: *const FsweErrorTable, out: *mut usize) -> FsweStatus {
    guard(|| match (table.as_ref(), out.is_null()) {
        (Some(t), false) => {
            *out = t.inner.rows.len();
            FsweStatus::Ok
        }
        _ => null("table or out"),
    })
}

/// Row `index`: step count, RMS error, its jackknife standard error and the
/// observed rate against the previous row (NaN for the first row).
///
/// # Safety
/// `table` must be a live handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fswe_table_row(
    table: *const FsweErrorTable,
    index: usize,
    steps: *mut usize,
    error: *mut f64,
    stderr: *mut f64,
    rate: *mut f64,
) -> FsweStatus {
    guard(|| {
        let Some(t) = table.as_ref() else { return null("table") };
        if steps.is_null() || error.is_null() || stderr.is_null() || rate.is_null() {
            return null("row output");
        }
        let Some(r) = t.inner.rows.get(index) else {
            set_error(format!("row {index} out of range (table has {})", t.inner.rows.len()));
            return FsweStatus::InvalidArgument;
        };
        *steps = r.steps;
        *error = r.error;
        *stderr = r.stderr;
        *rate = r.rate.unwrap_or(f64::NAN);
        FsweStatus::Ok
    })
}

/// # Safety
/// `table` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fswe_table_free(table: *mut FsweErrorTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Solves one trajectory at the finest step count and writes the modal
/// coefficients of u(T) into `u_out`, which must hold exactly `modes` values.
///
/// # Safety
/// `config` must be a live handle and `u_out` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fswe_solve_final(
    config: *const FsweConfig,
    trajectory: usize,
    u_out: *mut f64,
    len: usize,
) -> FsweStatus {
    guard(|| {
        let Some(c) = config.as_ref() else { return null("config") };
        if u_out.is_null() {
            return null("u_out");
        }
        if len != c.inner.modes {
            set_error(format!("buffer holds {len} values, configuration has {} modes", c.inner.modes));
            return FsweStatus::BufferSize;
        }
        let mut cfg = c.inner.clone();
        let n = cfg.finest_steps();
        cfg.step_counts = vec![n];
        let result = Harness::new(&cfg).and_then(|h| {
            let noise = h.sample_noise(trajectory)?;
            let scheme = SchemeConfig::new(cfg.alpha, cfg.final_time, n, cfg.modes, cfg.drift)?;
            Stepper::new(h.basis(), scheme)?.solve(&noise, &cfg.initial_state(), None)
        });
        match result {
            Ok(sol) if sol.final_state.u.is_finite() => {
                std::slice::from_raw_parts_mut(u_out, len).copy_from_slice(sol.final_state.u.coeffs());
                FsweStatus::Ok
            }
            Ok(_) => {
                set_error("solution is not finite");
                FsweStatus::Numerical
            }
            Err(e) => fail(e),
        }
    })
}
