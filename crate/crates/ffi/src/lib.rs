//! C ABI over `polyform`.
//!
//! Every fallible call returns a [`PfStatus`]; on anything but `PF_OK` the
//! message is available from [`pf_last_error`] on the same thread until the
//! next failing call. Handles are opaque and must be released with their
//! `*_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polyform::tree::{build_tree, SearchConfig, TreeReport};
use polyform::{Error, MGonalForm, RepTable};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfStatus {
    PfOk = 0,
    PfNullPointer = 1,
    PfInvalidGonality = 2,
    PfArithmeticRange = 3,
    PfContract = 4,
    PfBoundTooLarge = 5,
    PfTruncated = 6,
    PfCacheFormat = 7,
    PfCacheVersion = 8,
    PfIo = 9,
    PfParse = 10,
    PfPanic = 11,
}

/// Representability table for one form.
pub struct PfTable(RepTable);

/// Aggregate statistics of one escalator tree.
pub struct PfTreeReport(TreeReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PfStatus {
    match e {
        Error::InvalidGonality(_) => PfStatus::PfInvalidGonality,
        Error::ArithmeticRange(_) => PfStatus::PfArithmeticRange,
        Error::Contract(_) => PfStatus::PfContract,
        Error::BoundTooLarge { .. } => PfStatus::PfBoundTooLarge,
        Error::Truncated(_) => PfStatus::PfTruncated,
        Error::CacheFormat(_) => PfStatus::PfCacheFormat,
        Error::CacheVersion { .. } => PfStatus::PfCacheVersion,
        Error::Io(_) => PfStatus::PfIo,
        Error::Json(_) | Error::Parse(_) => PfStatus::PfParse,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PfStatus::PfOk,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            PfStatus::PfNullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            PfStatus::PfPanic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Fail> {
    if p.is_null() {
        return Err(Fail::Null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|e| Fail::Lib(Error::Parse(format!("path is not UTF-8: {e}"))))
}

/// Message of the last failure on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn pf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn pf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `*out_value = P_m(x)`.
///
/// # Safety
/// `out_value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pf_eval_polygonal(m: u32, x: i64, out_value: *mut u64) -> PfStatus {
    guard(|| {
        let o = out(out_value, "out_value")?;
        *o = polyform::eval_polygonal(m, x)?;
        Ok(())
    })
}

/// Builds the table of `sum coeffs[i] P_m(x_i)` over `[0, bound]`.
///
/// # Safety
/// `coeffs` must point to `n` readable values (or be null with `n == 0`);
/// `out_table` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pf_table_build(
    m: u32,
    coeffs: *const u64,
    n: usize,
    bound: u64,
    out_table: *mut *mut PfTable,
) -> PfStatus {
    guard(|| {
        let o = out(out_table, "out_table")?;
        let cs = if n == 0 {
            Vec::new()
        } else {
            if coeffs.is_null() {
                return Err(Fail::Null("coeffs"));
            }
            std::slice::from_raw_parts(coeffs, n).to_vec()
        };
        let form = MGonalForm::new(m, cs)?;
        let t = polyform::build_table(&form, bound)?;
        *o = Box::into_raw(Box::new(PfTable(t)));
        Ok(())
    })
}

/// New table for `parent` with coefficient `a` appended.
///
/// # Safety
/// `parent` must be a live table; `out_table` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pf_table_extend(
    parent: *const PfTable,
    a: u64,
    out_table: *mut *mut PfTable,
) -> PfStatus {
    guard(|| {
        let p = deref(parent, "parent")?;
        let o = out(out_table, "out_table")?;
        let t = polyform::extend_table(&p.0, a)?;
        *o = Box::into_raw(Box::new(PfTable(t)));
        Ok(())
    })
}

/// # Safety
/// `table` must be a live table; `out_flag` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pf_table_represents(
    table: *const PfTable,
    n: u64,
    out_flag: *mut bool,
) -> PfStatus {
    guard(|| {
        let t = deref(table, "table")?;
        *out(out_flag, "out_flag")? = t.0.represents(n);
        Ok(())
    })
}

/// Truant in `[1, B]`; `*out_universal` is set and `*out_truant` is 0 when none.
///
/// # Safety
/// `table` must be a live table; both outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pf_table_truant(
    table: *const PfTable,
    out_truant: *mut u64,
    out_universal: *mut bool,
) -> PfStatus {
    guard(|| {
        let t = deref(table, "table")?;
        let tr = t.0.truant();
        *out(out_truant, "out_truant")? = tr.truant().unwrap_or(0);
        *out(out_universal, "out_universal")? = tr.is_b_universal();
        Ok(())
    })
}

/// # Safety
/// `table` must be a live table; `out_bound` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pf_table_bound(table: *const PfTable, out_bound: *mut u64) -> PfStatus {
    guard(|| {
        *out(out_bound, "out_bound")? = deref(table, "table")?.0.bound();
        Ok(())
    })
}

/// Writes the table in the binary cache format.
///
/// # Safety
/// `table` must be a live table; `path` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn pf_table_save(table: *const PfTable, path: *const c_char) -> PfStatus {
    guard(|| {
        let t = deref(table, "table")?;
        let p = path_arg(path)?;
        let f = File::create(p).map_err(Error::from)?;
        t.0.write_to(BufWriter::new(f))?;
        Ok(())
    })
}

/// Reads a table written by [`pf_table_save`] or the CLI cache.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out_table` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pf_table_load(path: *const c_char, out_table: *mut *mut PfTable) -> PfStatus {
    guard(|| {
        let o = out(out_table, "out_table")?;
        let p = path_arg(path)?;
        let f = File::open(p).map_err(Error::from)?;
        let t = RepTable::read_from(BufReader::new(f))?;
        *o = Box::into_raw(Box::new(PfTable(t)));
        Ok(())
    })
}

/// # Safety
/// `table` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pf_table_free(table: *mut PfTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Builds the escalator tree; a `node_budget` of 0 uses the default.
///
/// # Safety
/// `out_report` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pf_tree_build(
    m: u32,
    bound: u64,
    node_budget: u64,
    out_report: *mut *mut PfTreeReport,
) -> PfStatus {
    guard(|| {
        let o = out(out_report, "out_report")?;
        let mut cfg = SearchConfig::with_bound(bound);
        if node_budget > 0 {
            cfg.node_budget = node_budget;
        }
        let tree = build_tree(m, &cfg)?;
        *o = Box::into_raw(Box::new(PfTreeReport(tree.report)));
        Ok(())
    })
}

/// Flat copy of a tree report; rank fields are 0 when there are no leaves.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PfTreeSummary {
    pub m: u32,
    pub bound: u64,
    pub gamma_b: u64,
    pub min_leaf_rank: u32,
    pub max_leaf_rank: u32,
    pub node_count: u64,
    pub leaf_count: u64,
    pub truncated: bool,
}

/// # Safety
/// `report` must be a live report; `out_summary` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pf_tree_summary(
    report: *const PfTreeReport,
    out_summary: *mut PfTreeSummary,
) -> PfStatus {
    guard(|| {
        let r = &deref(report, "report")?.0;
        *out(out_summary, "out_summary")? = PfTreeSummary {
            m: r.m,
            bound: r.bound,
            gamma_b: r.gamma_b,
            min_leaf_rank: r.min_leaf_rank.unwrap_or(0) as u32,
            max_leaf_rank: r.max_leaf_rank.unwrap_or(0) as u32,
            node_count: r.node_count,
            leaf_count: r.leaf_count,
            truncated: r.truncated,
        };
        Ok(())
    })
}

/// Number of leaves of the given rank.
///
/// # Safety
/// `report` must be a live report; `out_count` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pf_tree_leaves_of_rank(
    report: *const PfTreeReport,
    rank: u32,
    out_count: *mut u64,
) -> PfStatus {
    guard(|| {
        let r = &deref(report, "report")?.0;
        *out(out_count, "out_count")? = r
            .leaf_count_by_rank
            .get(&(rank as usize))
            .copied()
            .unwrap_or(0);
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pf_tree_report_free(report: *mut PfTreeReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
