//! C ABI for helix-se3.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `*_free`. Every fallible call returns an [`HsStatus`]; the text
//! of the most recent failure on the calling thread is available from
//! [`hs_last_error`].

use helix_se3::cli::{self, Command};
use helix_se3::config::RunConfig;
use helix_se3::output::{Cell, ResultTable};
use helix_se3::Error;
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    ConfigError = 2,
    NumericalError = 3,
    OracleFailure = 4,
    NullArgument = 10,
    InvalidUtf8 = 11,
    OutOfRange = 12,
    NotNumeric = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsCommand {
    Landscape = 0,
    Minima = 1,
    Dispersion = 2,
    StabilityScan = 3,
    TwistCheck = 4,
    TwoHelix = 5,
}

impl From<HsCommand> for Command {
    fn from(c: HsCommand) -> Self {
        match c {
            HsCommand::Landscape => Command::Landscape,
            HsCommand::Minima => Command::Minima,
            HsCommand::Dispersion => Command::Dispersion,
            HsCommand::StabilityScan => Command::StabilityScan,
            HsCommand::TwistCheck => Command::TwistCheck,
            HsCommand::TwoHelix => Command::TwoHelix,
        }
    }
}

/// A parsed run configuration.
pub struct HsConfig {
    inner: RunConfig,
}

/// A result table with its rendered CSV text.
pub struct HsTable {
    table: ResultTable,
    csv: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn remember(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HsStatus {
    match e.exit_code() {
        3 => HsStatus::NumericalError,
        4 => HsStatus::OracleFailure,
        _ => HsStatus::ConfigError,
    }
}

fn fail(e: &Error) -> HsStatus {
    remember(&e.to_string());
    status_of(e)
}

fn guarded(f: impl FnOnce() -> HsStatus) -> HsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            remember("panic inside helix-se3");
            HsStatus::Panic
        }
    }
}

fn null(what: &str) -> HsStatus {
    remember(&format!("null pointer passed for `{what}`"));
    HsStatus::NullArgument
}

/// Message for the last failing call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses configuration text into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_config_parse(text: *const c_char, out: *mut *mut HsConfig) -> HsStatus {
    guarded(|| {
        if text.is_null() {
            return null("text");
        }
        if out.is_null() {
            return null("out");
        }
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            remember("config text is not UTF-8");
            return HsStatus::InvalidUtf8;
        };
        match RunConfig::parse(s) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(HsConfig { inner: c }));
                HsStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `cfg` must come from [`hs_config_parse`] and not be freed already; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hs_config_free(cfg: *mut HsConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs `command`. On success, and on oracle or strict-mode failures that still
/// produce a table, `*out` receives a table handle; otherwise it is set to null.
///
/// # Safety
/// `cfg` must be a live config handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_run(cfg: *const HsConfig, command: HsCommand, out: *mut *mut HsTable) -> HsStatus {
    guarded(|| {
        if cfg.is_null() {
            return null("cfg");
        }
        if out.is_null() {
            return null("out");
        }
        *out = std::ptr::null_mut();
        match cli::run(command.into(), &(*cfg).inner) {
            Ok(outcome) => {
                let csv = CString::new(outcome.table.render()).unwrap_or_default();
                *out = Box::into_raw(Box::new(HsTable { table: outcome.table, csv }));
                match outcome.failure {
                    Some(e) => fail(&e),
                    None => HsStatus::Ok,
                }
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `table` must come from [`hs_run`] and not be freed already; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hs_table_free(table: *mut HsTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// CSV text of the table, owned by the handle.
///
/// # Safety
/// `table` must be a live table handle or null.
#[no_mangle]
pub unsafe extern "C" fn hs_table_csv(table: *const HsTable) -> *const c_char {
    if table.is_null() {
        return std::ptr::null();
    }
    (*table).csv.as_ptr()
}

/// # Safety
/// `table` must be a live table handle or null.
#[no_mangle]
pub unsafe extern "C" fn hs_table_rows(table: *const HsTable) -> usize {
    if table.is_null() { 0 } else { (*table).table.rows.len() }
}

/// # Safety
/// `table` must be a live table handle or null.
#[no_mangle]
pub unsafe extern "C" fn hs_table_columns(table: *const HsTable) -> usize {
    if table.is_null() { 0 } else { (*table).table.columns.len() }
}

/// Numeric cell at `(row, column)`; text cells such as `inf` markers are
/// reported as [`HsStatus::NotNumeric`].
///
/// # Safety
/// `table` must be a live table handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_table_value(table: *const HsTable, row: usize, column: usize, out: *mut f64) -> HsStatus {
    if table.is_null() {
        return null("table");
    }
    if out.is_null() {
        return null("out");
    }
    let t = &(*table).table;
    let Some(cell) = t.rows.get(row).and_then(|r| r.get(column)) else {
        remember(&format!("cell ({row}, {column}) is outside the table"));
        return HsStatus::OutOfRange;
    };
    match cell {
        Cell::Num(x) => *out = *x,
        Cell::Int(i) => *out = *i as f64,
        Cell::Text(s) => {
            remember(&format!("cell ({row}, {column}) holds `{s}`"));
            return HsStatus::NotNumeric;
        }
    }
    HsStatus::Ok
}

/// Debye length in Å for ionic strength `i` (mol/l), permittivity `eps_r`, temperature `t` (K).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_debye_length(i: f64, eps_r: f64, t: f64, out: *mut f64) -> HsStatus {
    if out.is_null() {
        return null("out");
    }
    match helix_se3::molecule::debye_length(i, eps_r, t) {
        Ok(l) => {
            *out = l;
            HsStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Generalized eigenvalues of the stability matrix at wavenumber `k`, ascending, into `out[0..6]`.
///
/// # Safety
/// `cfg` must be a live config handle and `out` point to six writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hs_dispersion_at(cfg: *const HsConfig, k: f64, out: *mut f64) -> HsStatus {
    guarded(|| {
        if cfg.is_null() {
            return null("cfg");
        }
        if out.is_null() {
            return null("out");
        }
        let solved = cli::linearization(&(*cfg).inner).and_then(|ctx| ctx.eigen(k));
        match solved {
            Ok(s) => {
                std::slice::from_raw_parts_mut(out, 6).copy_from_slice(&s.lambdas);
                HsStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
