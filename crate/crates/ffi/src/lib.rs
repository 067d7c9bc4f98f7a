//! C interface to `qql`.
//!
//! Every function returns a [`QqlStatus`]; results come back through out
//! pointers. Objects are opaque handles released with their `_free`
//! function, strings with [`qql_string_free`]. After a failure,
//! [`qql_last_error_message`] describes it on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qql::bounds::{is_feasible, m_sum, parse_rational, sorting_lower_bound, BoundQuery};
use qql::oracle::{FamilyKind, FunctionFamily};
use qql::optimizer::{optimize, OptimizerConfig};
use qql::reference::{build_character_distinguisher, build_uniform_subset_algorithm, AlgorithmBundle};
use qql::report::rational_to_f64;
use qql::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QqlStatus {
    Ok = 0,
    Domain = 1,
    Parameter = 2,
    Capacity = 3,
    Model = 4,
    Validation = 5,
    Io = 6,
    NullPointer = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// A family of Boolean functions.
pub struct QqlFamily(FunctionFamily);

/// A reference algorithm with its measurement and family.
pub struct QqlBundle(AlgorithmBundle);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QqlStatus {
    match e {
        Error::Domain(_) => QqlStatus::Domain,
        Error::Parameter(_) => QqlStatus::Parameter,
        Error::Capacity(_) => QqlStatus::Capacity,
        Error::Model(_) => QqlStatus::Model,
        Error::Validation(_) | Error::Json(_) => QqlStatus::Validation,
        Error::Io(_) => QqlStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (QqlStatus, String)>) -> QqlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QqlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_owned());
            QqlStatus::Panic
        }
    }
}

fn lib(e: Error) -> (QqlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (QqlStatus, String) {
    (QqlStatus::NullPointer, format!("{name} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (QqlStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (QqlStatus::Validation, format!("{name} is not UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qql_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qql_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a family file (`{"domain_size": N, "functions": ["+-+", ..]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qql_family_from_json(json: *const c_char, out: *mut *mut QqlFamily) -> QqlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let fam = FunctionFamily::from_json(read_str(json, "json")?).map_err(lib)?;
        *out = Box::into_raw(Box::new(QqlFamily(fam)));
        Ok(())
    })
}

unsafe fn make_family(kind: FamilyKind, out: *mut *mut QqlFamily) -> QqlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let fam = FunctionFamily::make(kind).map_err(lib)?;
        *out = Box::into_raw(Box::new(QqlFamily(fam)));
        Ok(())
    })
}

/// The `N` single-point functions on `1..N`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qql_family_grover(domain_size: u32, out: *mut *mut QqlFamily) -> QqlStatus {
    make_family(FamilyKind::Grover { domain_size }, out)
}

/// The `2^n` characters on `N = 2^n - 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qql_family_characters(n: u32, out: *mut *mut QqlFamily) -> QqlStatus {
    make_family(FamilyKind::Characters { n }, out)
}

/// All `2^N` functions.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qql_family_all(domain_size: u32, out: *mut *mut QqlFamily) -> QqlStatus {
    make_family(FamilyKind::All { domain_size }, out)
}

/// # Safety
/// `family` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qql_family_len(family: *const QqlFamily, out: *mut usize) -> QqlStatus {
    guard(|| {
        let fam = family.as_ref().ok_or_else(|| null("family"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = fam.0.len();
        Ok(())
    })
}

/// # Safety
/// `family` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qql_family_free(family: *mut QqlFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Single-query character distinguisher for `1 <= n <= 6`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qql_bundle_character_distinguisher(n: u32, out: *mut *mut QqlBundle) -> QqlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let b = build_character_distinguisher(n).map_err(lib)?;
        *out = Box::into_raw(Box::new(QqlBundle(b)));
        Ok(())
    })
}

/// `k`-query uniform-subset algorithm on all functions of `N` points.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qql_bundle_uniform_subset(domain_size: u32, k: u32, out: *mut *mut QqlBundle) -> QqlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let b = build_uniform_subset_algorithm(domain_size, k).map_err(lib)?;
        *out = Box::into_raw(Box::new(QqlBundle(b)));
        Ok(())
    })
}

/// Number of functions (and outcomes) of the bundle.
///
/// # Safety
/// `bundle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qql_bundle_family_size(bundle: *const QqlBundle, out: *mut usize) -> QqlStatus {
    guard(|| {
        let b = bundle.as_ref().ok_or_else(|| null("bundle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = b.0.family.len();
        Ok(())
    })
}

/// Writes the `D x D` success matrix row-major (row = outcome) into `out`,
/// which holds `len` doubles.
///
/// # Safety
/// `bundle` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn qql_bundle_success_matrix(bundle: *const QqlBundle, out: *mut f64, len: usize) -> QqlStatus {
    guard(|| {
        let b = bundle.as_ref().ok_or_else(|| null("bundle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = b.0.family.len();
        if len < d * d {
            return Err((QqlStatus::BufferTooSmall, format!("need {} doubles, got {len}", d * d)));
        }
        let sm = b.0.success_matrix().map_err(lib)?;
        let dst = std::slice::from_raw_parts_mut(out, d * d);
        for (l, row) in sm.rows().iter().enumerate() {
            dst[l * d..(l + 1) * d].copy_from_slice(row);
        }
        Ok(())
    })
}

/// Guaranteed success probability as a double and, if `text` is not NULL,
/// as an exact `"num/den"` string to release with [`qql_string_free`].
///
/// # Safety
/// `bundle` must be a live handle, `value` writable, `text` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qql_bundle_predicted_success(
    bundle: *const QqlBundle,
    value: *mut f64,
    text: *mut *mut c_char,
) -> QqlStatus {
    guard(|| {
        let b = bundle.as_ref().ok_or_else(|| null("bundle"))?;
        if value.is_null() {
            return Err(null("value"));
        }
        *value = rational_to_f64(&b.0.predicted_success);
        if !text.is_null() {
            *text = to_c_string(qql::bounds::format_rational(&b.0.predicted_success));
        }
        Ok(())
    })
}

/// # Safety
/// `bundle` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qql_bundle_free(bundle: *mut QqlBundle) {
    if !bundle.is_null() {
        drop(Box::from_raw(bundle));
    }
}

/// `M(N, k)` as a decimal string to release with [`qql_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qql_m_sum_string(domain_size: u64, k: u64, out: *mut *mut c_char) -> QqlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c_string(m_sum(domain_size, k).map_err(lib)?.to_str_radix(10));
        Ok(())
    })
}

/// Smallest `k` the counting bound allows for sorting `n >= 2` items.
///
/// # Safety
/// `k_min` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qql_sorting_lower_bound(n: u64, k_min: *mut u64) -> QqlStatus {
    guard(|| {
        if k_min.is_null() {
            return Err(null("k_min"));
        }
        *k_min = sorting_lower_bound(n).map_err(lib)?.k_min;
        Ok(())
    })
}

/// Whether `D` functions can be identified with probability `p` (a string
/// such as `"7/8"`) using `k` queries on `N` points.
///
/// # Safety
/// `p` and `family_size` must be NUL-terminated strings, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qql_is_feasible(
    domain_size: u64,
    k: u64,
    p: *const c_char,
    family_size: *const c_char,
    out: *mut bool,
) -> QqlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = parse_rational(read_str(p, "p")?).map_err(lib)?;
        let d_text = read_str(family_size, "family_size")?;
        let d = d_text
            .parse()
            .map_err(|_| (QqlStatus::Parameter, format!("cannot parse {d_text:?} as a family size")))?;
        *out = is_feasible(&BoundQuery::new(domain_size, k, p, d).map_err(lib)?).map_err(lib)?;
        Ok(())
    })
}

/// Optimizer summary.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QqlOptSummary {
    pub best_worst_case: f64,
    /// `M(N, k) / D`.
    pub bound_ceiling: f64,
    pub converged: bool,
    pub restarts_run: usize,
    pub workspace: usize,
}

/// Runs the optimizer with default settings apart from the given ones.
/// `workspace = 0` selects the default.
///
/// # Safety
/// `family` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qql_optimize(
    family: *const QqlFamily,
    k: usize,
    restarts: usize,
    iterations: usize,
    seed: u64,
    workspace: usize,
    out: *mut QqlOptSummary,
) -> QqlStatus {
    guard(|| {
        let fam = family.as_ref().ok_or_else(|| null("family"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = OptimizerConfig {
            restarts,
            max_iterations: iterations,
            seed,
            workspace: (workspace > 0).then_some(workspace),
            ..OptimizerConfig::default()
        };
        let res = optimize(&fam.0, k, &cfg).map_err(lib)?;
        *out = QqlOptSummary {
            best_worst_case: res.best_worst_case,
            bound_ceiling: rational_to_f64(&res.bound_ceiling),
            converged: res.converged,
            restarts_run: res.restarts_run,
            workspace: res.workspace,
        };
        Ok(())
    })
}
