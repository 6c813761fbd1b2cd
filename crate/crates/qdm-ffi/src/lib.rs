//! C ABI for qdm-core.
//!
//! Models are opaque handles created from a JSON config and released with
//! `qdm_model_free`. Every fallible call returns a `QdmStatus`; on failure
//! `qdm_last_error` describes the most recent error on the calling thread.
//! Strings handed out by the library are released with `qdm_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use qdm_core::cli::{run, Command, ModelConfig, RunOptions};
use qdm_core::cyclic_action::orbit_decomposition;
use qdm_core::spectrum::ground_degeneracy;
use qdm_core::state_space::{ModelSpace, DEFAULT_DIM_CAP};
use qdm_core::{ErrorClass, QdmError};

/// Result of every fallible call. The nonzero values match the exit codes
/// of the command-line tool, plus one for bad arguments.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdmStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    InvalidArgument = 1,
    Config = 2,
    DimensionCap = 3,
    Internal = 4,
    Fusion = 5,
    PathUnavailable = 6,
}

impl From<ErrorClass> for QdmStatus {
    fn from(c: ErrorClass) -> Self {
        match c {
            ErrorClass::Config => QdmStatus::Config,
            ErrorClass::DimensionCap => QdmStatus::DimensionCap,
            ErrorClass::Internal => QdmStatus::Internal,
            ErrorClass::Fusion => QdmStatus::Fusion,
            ErrorClass::PathUnavailable => QdmStatus::PathUnavailable,
        }
    }
}

/// Report selector for `qdm_model_run`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdmCommand {
    Analyze = 0,
    Fuse = 1,
    Confine = 2,
    Glue = 3,
}

/// Opaque model handle.
pub struct QdmModel {
    config: ModelConfig,
    space: Arc<ModelSpace>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: QdmStatus, msg: impl Into<String>) -> QdmStatus {
    set_error(msg);
    status
}

fn from_error(e: QdmError) -> QdmStatus {
    fail(e.class().into(), e.to_string())
}

/// Runs `f`, converting errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), QdmStatus>>(f: F) -> QdmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QdmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(QdmStatus::Internal, "panic inside qdm-core"),
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, QdmStatus> {
    if s.is_null() {
        return Err(fail(QdmStatus::InvalidArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(QdmStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn model<'a>(m: *const QdmModel) -> Result<&'a QdmModel, QdmStatus> {
    m.as_ref().ok_or_else(|| fail(QdmStatus::InvalidArgument, "model is null"))
}

fn check_out<T>(out: *mut T) -> Result<(), QdmStatus> {
    if out.is_null() {
        Err(fail(QdmStatus::InvalidArgument, "output pointer is null"))
    } else {
        Ok(())
    }
}

fn build(config: ModelConfig) -> Result<Box<QdmModel>, QdmStatus> {
    let space = config.space(DEFAULT_DIM_CAP).map_err(from_error)?;
    Ok(Box::new(QdmModel { config, space }))
}

unsafe fn publish(out: *mut *mut QdmModel, m: Box<QdmModel>) {
    *out = Box::into_raw(m);
}

/// Parses a JSON config. Relative `w_file` paths resolve against the
/// working directory. On success `*out` owns a new model.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdm_model_from_json(json: *const c_char, out: *mut *mut QdmModel) -> QdmStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let text = read_str(json, "json")?;
        let config = ModelConfig::from_json(text).map_err(from_error)?;
        publish(out, build(config)?);
        Ok(())
    })
}

/// Loads a JSON config file. Relative `w_file` paths resolve against the
/// file's directory.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdm_model_from_file(path: *const c_char, out: *mut *mut QdmModel) -> QdmStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let p = read_str(path, "path")?;
        let config = ModelConfig::load(Path::new(p)).map_err(from_error)?;
        publish(out, build(config)?);
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from `qdm_model_from_json` or `qdm_model_from_file`
/// and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qdm_model_free(model: *mut QdmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Hilbert space dimension.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdm_model_dimension(model: *const QdmModel, out: *mut u64) -> QdmStatus {
    guard(|| {
        check_out(out)?;
        *out = self::model(model)?.space.dim() as u64;
        Ok(())
    })
}

/// Number of orbits of the matter action.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdm_model_d_alg(model: *const QdmModel, out: *mut u64) -> QdmStatus {
    guard(|| {
        check_out(out)?;
        *out = orbit_decomposition(self::model(model)?.space.action()).d_alg as u64;
        Ok(())
    })
}

/// Exact ground state degeneracy, honouring the config's exclusions.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdm_model_ground_degeneracy(model: *const QdmModel, out: *mut u64) -> QdmStatus {
    guard(|| {
        check_out(out)?;
        let m = self::model(model)?;
        *out = ground_degeneracy(&m.space, &m.config.exclusion()).map_err(from_error)?;
        Ok(())
    })
}

/// Produces the same report as the command-line tool: JSON for analyze,
/// fuse and glue, CSV for confine. A `dense_cap` of 0 keeps the config's
/// value. On success `*out` owns a string for `qdm_string_free`.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdm_model_run(
    model: *const QdmModel,
    command: QdmCommand,
    seed: u64,
    dense_cap: usize,
    out: *mut *mut c_char,
) -> QdmStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let m = self::model(model)?;
        let cmd = match command {
            QdmCommand::Analyze => Command::Analyze,
            QdmCommand::Fuse => Command::Fuse,
            QdmCommand::Confine => Command::Confine,
            QdmCommand::Glue => Command::Glue,
        };
        let opts = RunOptions { seed, dense_cap: (dense_cap > 0).then_some(dense_cap), ..RunOptions::default() };
        let text = run(cmd, &m.config, &opts).map_err(from_error)?;
        let c = CString::new(text).map_err(|_| fail(QdmStatus::Internal, "report contains NUL"))?;
        *out = c.into_raw();
        Ok(())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qdm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qdm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
