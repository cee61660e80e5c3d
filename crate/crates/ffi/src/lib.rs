//! C ABI over `absep`.
//!
//! Every function returns an [`AbsepStatus`]; results come back through out
//! pointers. On failure the message is kept per thread and can be fetched with
//! [`absep_last_error`]. Handles are opaque and must be released with their
//! `_free` function; strings returned by the library with [`absep_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use absep::chull::{builtin_sets, hull_membership};
use absep::criteria::{multipartite_alpha_bounds, symmetric_alpha_bounds};
use absep::falsify::{falsify_ap, falsify_sap};
use absep::report::{check_spectrum, Aggregate, CertificateReport, CheckOptions};
use absep::{validate_spectrum, Error, Spectrum, SystemDims};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsepStatus {
    Ok = 0,
    NullPointer = 1,
    LengthMismatch = 2,
    NegativeEigenvalue = 3,
    TraceError = 4,
    InvalidDims = 5,
    Unsupported = 6,
    InvalidArgument = 7,
    IterationBudgetExhausted = 8,
    Inconsistent = 9,
    Internal = 10,
    Panic = 11,
}

/// Aggregate verdict of a report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsepAggregate {
    AsCertified = 0,
    FullySepCertified = 1,
    SasCertified = 2,
    SapCertified = 3,
    NotAp = 4,
    Inconclusive = 5,
}

/// A validated spectrum together with its dimension layout.
pub struct AbsepSpectrum {
    spectrum: Spectrum,
    dims: SystemDims,
}

/// Result of a full criteria check.
pub struct AbsepReport {
    report: CertificateReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> AbsepStatus {
    match e {
        Error::LengthMismatch { .. } => AbsepStatus::LengthMismatch,
        Error::NegativeEigenvalue { .. } => AbsepStatus::NegativeEigenvalue,
        Error::TraceError { .. } => AbsepStatus::TraceError,
        Error::InvalidDims(_) | Error::DimsMismatch(_) | Error::DimensionTooLarge { .. } => AbsepStatus::InvalidDims,
        Error::UnsupportedDims(_) | Error::SymmetricDimsUnsupported => AbsepStatus::Unsupported,
        Error::IterationBudgetExhausted { .. } => AbsepStatus::IterationBudgetExhausted,
        Error::Inconsistent(_) => AbsepStatus::Inconsistent,
        e if e.is_input_error() => AbsepStatus::InvalidArgument,
        _ => AbsepStatus::Internal,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), AbsepStatus>) -> AbsepStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AbsepStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("panic inside absep".into());
            AbsepStatus::Panic
        }
    }
}

fn fail(e: Error) -> AbsepStatus {
    let status = status_of(&e);
    set_last_error(e.to_string());
    status
}

fn null(what: &str) -> AbsepStatus {
    set_last_error(format!("{what} is null"));
    AbsepStatus::NullPointer
}

/// # Safety
/// `ptr` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(ptr: *const f64, len: usize) -> Result<&'a [f64], AbsepStatus> {
    if ptr.is_null() {
        return Err(null("values"));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `values` must point to `len` doubles; `out` must be writable.
unsafe fn new_spectrum(values: *const f64, len: usize, dims: absep::Result<SystemDims>, out: *mut *mut AbsepSpectrum) -> AbsepStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let raw = slice(values, len)?;
        let dims = dims.map_err(fail)?;
        let spectrum = validate_spectrum(raw, &dims).map_err(fail)?;
        *out = Box::into_raw(Box::new(AbsepSpectrum { spectrum, dims }));
        Ok(())
    })
}

/// Validates `len` eigenvalues for `C^n ⊗ C^m`.
///
/// # Safety
/// `values` must point to `len` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn absep_spectrum_new_bipartite(
    values: *const f64,
    len: usize,
    n: usize,
    m: usize,
    out: *mut *mut AbsepSpectrum,
) -> AbsepStatus {
    new_spectrum(values, len, SystemDims::bipartite(n, m), out)
}

/// Validates `len` eigenvalues for `n` qudits of dimension `d`.
///
/// # Safety
/// As [`absep_spectrum_new_bipartite`].
#[no_mangle]
pub unsafe extern "C" fn absep_spectrum_new_multiqudit(
    values: *const f64,
    len: usize,
    d: usize,
    n: usize,
    out: *mut *mut AbsepSpectrum,
) -> AbsepStatus {
    new_spectrum(values, len, SystemDims::multiqudit(d, n), out)
}

/// Validates `len` eigenvalues on the symmetric subspace of `n` qudits of dimension `d`.
///
/// # Safety
/// As [`absep_spectrum_new_bipartite`].
#[no_mangle]
pub unsafe extern "C" fn absep_spectrum_new_symmetric(
    values: *const f64,
    len: usize,
    d: usize,
    n: usize,
    out: *mut *mut AbsepSpectrum,
) -> AbsepStatus {
    new_spectrum(values, len, SystemDims::symmetric(d, n), out)
}

/// Number of eigenvalues.
///
/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn absep_spectrum_len(spectrum: *const AbsepSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.spectrum.len())
}

/// Copies the sorted, normalized eigenvalues into `buf` (capacity `cap`).
///
/// # Safety
/// `spectrum` must be a live handle and `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn absep_spectrum_values(spectrum: *const AbsepSpectrum, buf: *mut f64, cap: usize) -> AbsepStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let values = s.spectrum.values();
        if cap < values.len() {
            return Err(fail(Error::LengthMismatch { expected: values.len(), actual: cap }));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}

/// # Safety
/// `spectrum` must be null or a handle from `absep_spectrum_new_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn absep_spectrum_free(spectrum: *mut AbsepSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Runs all applicable criteria and the hull search.
///
/// # Safety
/// `spectrum` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn absep_check(
    spectrum: *const AbsepSpectrum,
    tol: f64,
    max_iter: usize,
    out: *mut *mut AbsepReport,
) -> AbsepStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        let opts = CheckOptions { tol, max_iter, ..CheckOptions::default() };
        let report = check_spectrum(&s.spectrum, &s.dims, &opts).map_err(fail)?;
        *out = Box::into_raw(Box::new(AbsepReport { report }));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn absep_report_aggregate(report: *const AbsepReport, out: *mut AbsepAggregate) -> AbsepStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match r.report.aggregate {
            Aggregate::AsCertified => AbsepAggregate::AsCertified,
            Aggregate::FullySepCertified => AbsepAggregate::FullySepCertified,
            Aggregate::SasCertified => AbsepAggregate::SasCertified,
            Aggregate::SapCertified => AbsepAggregate::SapCertified,
            Aggregate::NotAp => AbsepAggregate::NotAp,
            Aggregate::Inconclusive => AbsepAggregate::Inconclusive,
        };
        Ok(())
    })
}

/// Serializes the report as JSON. Free the string with [`absep_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn absep_report_to_json(report: *const AbsepReport, out: *mut *mut c_char) -> AbsepStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let json = serde_json::to_string(&r.report).map_err(|e| fail(e.into()))?;
        *out = CString::new(json).map_err(|_| AbsepStatus::Internal)?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle from [`absep_check`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn absep_report_free(report: *mut AbsepReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Hull membership over the built-in sets for the spectrum's layout.
///
/// # Safety
/// `spectrum` must be a live handle; `feasible` and `residual` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn absep_hull_membership(
    spectrum: *const AbsepSpectrum,
    tol: f64,
    max_iter: usize,
    feasible: *mut bool,
    residual: *mut f64,
) -> AbsepStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        let feasible = feasible.as_mut().ok_or_else(|| null("feasible"))?;
        let residual = residual.as_mut().ok_or_else(|| null("residual"))?;
        let sets = builtin_sets(&s.dims).map_err(fail)?;
        let cert = hull_membership(&s.spectrum, &sets, tol, max_iter).map_err(fail)?.certificate();
        *feasible = cert.feasible;
        *residual = cert.residual;
        Ok(())
    })
}

/// Random search for a unitary that makes the spectrum NPT.
///
/// # Safety
/// `spectrum` must be a live handle; `found` and `best_min_eig` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn absep_falsify(
    spectrum: *const AbsepSpectrum,
    samples: u64,
    seed: u64,
    found: *mut bool,
    best_min_eig: *mut f64,
) -> AbsepStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        let found = found.as_mut().ok_or_else(|| null("found"))?;
        let best = best_min_eig.as_mut().ok_or_else(|| null("best_min_eig"))?;
        let outcome = match s.dims {
            SystemDims::Symmetric { d, n } => falsify_sap(&s.spectrum, d, n, samples, seed),
            _ => falsify_ap(&s.spectrum, &s.dims, samples, seed),
        }
        .map_err(fail)?;
        *found = outcome.witness_found;
        *best = outcome.best_min_pt_eig;
        Ok(())
    })
}

/// Reduction-map range `[α_−, α_+]` for `n` qudits of dimension `d`, on the
/// full space or (if `symmetric`) the symmetric subspace.
///
/// # Safety
/// `alpha_minus` and `alpha_plus` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn absep_alpha_bounds(
    d: usize,
    n: usize,
    symmetric: bool,
    alpha_minus: *mut f64,
    alpha_plus: *mut f64,
) -> AbsepStatus {
    guard(|| {
        let lo = alpha_minus.as_mut().ok_or_else(|| null("alpha_minus"))?;
        let hi = alpha_plus.as_mut().ok_or_else(|| null("alpha_plus"))?;
        let bounds = if symmetric {
            SystemDims::symmetric(d, n).map_err(fail)?;
            symmetric_alpha_bounds(d, n)
        } else {
            SystemDims::multiqudit(d, n).map_err(fail)?;
            multipartite_alpha_bounds(d, n)
        };
        *lo = bounds.alpha_minus;
        *hi = bounds.alpha_plus;
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null. Free with [`absep_string_free`].
#[no_mangle]
pub extern "C" fn absep_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn absep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
