//! C interface to `kleinsim`.
//!
//! Configs and reports are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns a
//! [`KsStatus`]; the message of the last failure on the calling thread is
//! available from [`ks_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use kleinsim::analytic::{klein_gamma, tunnel_prob_analytic, IonParams};
use kleinsim::scenarios::{
    emit_frames, load_config, run_scenario, write_summary, Engine, FrameFormat, RunReport,
    ScenarioConfig,
};
use kleinsim::Error;

/// Opaque scenario configuration.
pub struct KsConfig(ScenarioConfig);

/// Opaque result of a run.
pub struct KsReport(RunReport);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Runtime = 4,
    Io = 5,
    /// The requested value does not exist for this run.
    Unavailable = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Which tunneling estimate to read from a report.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KsEstimate {
    /// Negative-branch population of the final frame.
    Branch = 0,
    /// Weight beyond the classical turning point.
    Position = 1,
    /// Negative-branch probability of the energy filter.
    Filter = 2,
    /// Landau-Zener prediction.
    Analytic = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn status_of(e: &Error) -> KsStatus {
    match e {
        Error::Config { .. } => KsStatus::Config,
        Error::Scenario { source, .. } => status_of(source),
        Error::InvalidGrid(_) | Error::InvalidParams(_) | Error::InconsistentScenario(_) => {
            KsStatus::InvalidArgument
        }
        Error::Io(_) => KsStatus::Io,
        _ => KsStatus::Runtime,
    }
}

fn guard(f: impl FnOnce() -> Result<(), KsStatus>) -> KsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            KsStatus::Panic
        }
    }
}

fn fail(e: Error) -> KsStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, KsStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(KsStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        KsStatus::InvalidArgument
    })
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, KsStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle");
        KsStatus::NullPointer
    })
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, KsStatus> {
    p.as_mut().ok_or_else(|| {
        set_error("null output pointer");
        KsStatus::NullPointer
    })
}

/// Message of the last failed call on this thread, empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ks_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ks_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a config file, or a shipped config by name.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out_config` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ks_config_load(spec: *const c_char, out_config: *mut *mut KsConfig) -> KsStatus {
    guard(|| {
        let slot = out(out_config)?;
        *slot = ptr::null_mut();
        let cfg = load_config(text(spec)?).map_err(fail)?;
        *slot = Box::into_raw(Box::new(KsConfig(cfg)));
        Ok(())
    })
}

/// Parses config text.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out_config` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ks_config_parse(source: *const c_char, out_config: *mut *mut KsConfig) -> KsStatus {
    guard(|| {
        let slot = out(out_config)?;
        *slot = ptr::null_mut();
        let cfg = ScenarioConfig::parse(text(source)?).map_err(fail)?;
        *slot = Box::into_raw(Box::new(KsConfig(cfg)));
        Ok(())
    })
}

/// Switches the engine ("dirac", "ion-ideal" or "ion-corrected"). The config
/// is left unchanged on failure.
///
/// # Safety
/// `config` must come from this library and `engine` be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ks_config_set_engine(config: *mut KsConfig, engine: *const c_char) -> KsStatus {
    guard(|| {
        let cfg = out(config)?;
        let e: Engine = text(engine)?.parse().map_err(fail)?;
        cfg.0 = cfg.0.clone().with_engine(e).map_err(fail)?;
        Ok(())
    })
}

/// Writes the 64-character hex config hash plus NUL into `buf`.
///
/// # Safety
/// `buf` must hold at least `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ks_config_hash(config: *const KsConfig, buf: *mut c_char, len: usize) -> KsStatus {
    guard(|| {
        let cfg = deref(config)?;
        if buf.is_null() {
            set_error("null buffer");
            return Err(KsStatus::NullPointer);
        }
        let hash = cfg.0.hash();
        if len < hash.len() + 1 {
            set_error(format!("hash needs {} bytes", hash.len() + 1));
            return Err(KsStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(hash.as_ptr().cast(), buf, hash.len());
        *buf.add(hash.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `config` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ks_config_free(config: *mut KsConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs a scenario.
///
/// # Safety
/// `config` must come from this library and `out_report` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ks_run(config: *const KsConfig, out_report: *mut *mut KsReport) -> KsStatus {
    guard(|| {
        let slot = out(out_report)?;
        *slot = ptr::null_mut();
        let report = run_scenario(&deref(config)?.0).map_err(fail)?;
        *slot = Box::into_raw(Box::new(KsReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ks_report_free(report: *mut KsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of recorded frames, 0 for a null handle.
///
/// # Safety
/// `report` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ks_report_frame_count(report: *const KsReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.frames.len())
}

/// Number of grid points per density, 0 for a null handle.
///
/// # Safety
/// `report` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ks_report_grid_len(report: *const KsReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.grid().len())
}

unsafe fn frame_value(
    report: *const KsReport,
    frame: usize,
    value: *mut f64,
    pick: impl Fn(&kleinsim::scenarios::FrameRecord) -> f64,
) -> KsStatus {
    guard(|| {
        let r = deref(report)?;
        let slot = out(value)?;
        let f = r.0.frames.get(frame).ok_or_else(|| {
            set_error(format!("frame {frame} out of range ({} frames)", r.0.frames.len()));
            KsStatus::InvalidArgument
        })?;
        *slot = pick(f);
        Ok(())
    })
}

/// Time of a frame in μs.
///
/// # Safety
/// `report` must come from this library and `time_us` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ks_report_frame_time(report: *const KsReport, frame: usize, time_us: *mut f64) -> KsStatus {
    frame_value(report, frame, time_us, |f| f.time)
}

/// Mean position of a frame in units of Δ.
///
/// # Safety
/// `report` must come from this library and `mean_x` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ks_report_mean_x(report: *const KsReport, frame: usize, mean_x: *mut f64) -> KsStatus {
    frame_value(report, frame, mean_x, |f| f.mean_x)
}

/// Copies the grid positions (Δ) into `buf`, which must hold
/// `ks_report_grid_len` values.
///
/// # Safety
/// `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ks_report_positions(report: *const KsReport, buf: *mut f64, len: usize) -> KsStatus {
    guard(|| {
        let r = deref(report)?;
        copy_out(&r.0.grid().positions(), buf, len)
    })
}

/// Copies the density of a frame into `buf`, which must hold
/// `ks_report_grid_len` values.
///
/// # Safety
/// `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ks_report_density(
    report: *const KsReport,
    frame: usize,
    buf: *mut f64,
    len: usize,
) -> KsStatus {
    guard(|| {
        let r = deref(report)?;
        let f = r.0.frames.get(frame).ok_or_else(|| {
            set_error(format!("frame {frame} out of range ({} frames)", r.0.frames.len()));
            KsStatus::InvalidArgument
        })?;
        copy_out(&f.density, buf, len)
    })
}

unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize) -> Result<(), KsStatus> {
    if buf.is_null() {
        set_error("null buffer");
        return Err(KsStatus::NullPointer);
    }
    if len < values.len() {
        set_error(format!("buffer holds {len} values, need {}", values.len()));
        return Err(KsStatus::BufferTooSmall);
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

/// Reads one tunneling estimate; `kind` is a `KsEstimate` value. Returns
/// `Unavailable` when the run could not produce it (for example the branch
/// estimate before the parts separate).
///
/// # Safety
/// `report` must come from this library and `value` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ks_report_tunneling(report: *const KsReport, kind: u32, value: *mut f64) -> KsStatus {
    guard(|| {
        let kind = match kind {
            0 => KsEstimate::Branch,
            1 => KsEstimate::Position,
            2 => KsEstimate::Filter,
            3 => KsEstimate::Analytic,
            other => {
                set_error(format!("unknown estimate kind {other}"));
                return Err(KsStatus::InvalidArgument);
            }
        };
        let r = &deref(report)?.0;
        let slot = out(value)?;
        let v = match kind {
            KsEstimate::Branch => r.tunneling.branch,
            KsEstimate::Position => r.tunneling.position,
            KsEstimate::Filter => r.tunneling.filter,
            KsEstimate::Analytic => r.analytic,
        };
        match v {
            Some(x) => {
                *slot = x;
                Ok(())
            }
            None => {
                set_error(match (&r.tunneling.branch_note, kind) {
                    (Some(n), KsEstimate::Branch) => n.clone(),
                    _ => format!("{kind:?} estimate not available for this run"),
                });
                Err(KsStatus::Unavailable)
            }
        }
    })
}

/// Writes summary.json into `dir`.
///
/// # Safety
/// `report` must come from this library and `dir` be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ks_report_write_summary(report: *const KsReport, dir: *const c_char) -> KsStatus {
    guard(|| {
        let r = deref(report)?;
        write_summary(&r.0, Path::new(text(dir)?)).map_err(fail)?;
        Ok(())
    })
}

/// Writes one file per frame plus an index into `dir`; `format` is "csv" or
/// "ndjson".
///
/// # Safety
/// `report` must come from this library; `dir` and `format` be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ks_report_emit_frames(
    report: *const KsReport,
    dir: *const c_char,
    format: *const c_char,
) -> KsStatus {
    guard(|| {
        let r = deref(report)?;
        let fmt: FrameFormat = text(format)?.parse().map_err(fail)?;
        emit_frames(&r.0, Path::new(text(dir)?), fmt).map_err(fail)?;
        Ok(())
    })
}

/// Landau-Zener tunneling of the linear-slope settings at the given second
/// drive strength (kHz).
///
/// # Safety
/// `value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ks_analytic_tunneling(omega_tilde2_khz: f64, value: *mut f64) -> KsStatus {
    guard(|| {
        let slot = out(value)?;
        *slot = kleinsim::analytic::analytic_tunneling(&IonParams::linear_slope(omega_tilde2_khz))
            .map_err(fail)?;
        Ok(())
    })
}

/// Γ = (mc²)² / (2 c g).
///
/// # Safety
/// `gamma` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ks_klein_gamma(mc2: f64, c: f64, g: f64, gamma: *mut f64) -> KsStatus {
    guard(|| {
        let slot = out(gamma)?;
        *slot = klein_gamma(mc2, c, g).map_err(fail)?;
        Ok(())
    })
}

/// e^(−2πΓ).
///
/// # Safety
/// `probability` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ks_tunnel_prob_analytic(gamma: f64, probability: *mut f64) -> KsStatus {
    guard(|| {
        let slot = out(probability)?;
        *slot = tunnel_prob_analytic(gamma).map_err(fail)?;
        Ok(())
    })
}
