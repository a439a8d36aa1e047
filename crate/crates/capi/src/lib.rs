//! C ABI for the fuzzy-consensus library.
//!
//! Conventions: every constructor has a matching `fc_*_free`; strings
//! returned by accessors are owned by the caller and must be released with
//! `fc_string_free` (never the C runtime's `free`); functions that can fail
//! return an `FcStatus` and leave details for `fc_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use fuzzy_consensus::consensus::{
    classify, consensus_crisp, consensus_fuzzy_1d, consensus_grid, Classification,
    ConsensusResult, DepthMode,
};
use fuzzy_consensus::estimators::{m_estimate, mean, median, Psi};
use fuzzy_consensus::{Error, Measurement};

/// Outcome of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    /// Bad argument or input data; details via `fc_last_error_message`.
    InvalidInput = 1,
    /// Request the build cannot serve (dimension, grid size).
    Unsupported = 2,
    /// Numerical failure (degenerate scale, non-convergence).
    Numerical = 3,
    /// A required pointer was null.
    NullPointer = 4,
}

/// Weight function selector for `fc_m_estimate`, with standard tuning.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcPsi {
    Huber = 0,
    TukeyBiweight = 1,
    Hampel = 2,
    AndrewsSine = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn remember_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(e: &Error) -> FcStatus {
    remember_error(&e.to_string());
    match e {
        Error::Parse { .. } | Error::InvalidInput(_) | Error::Io(_) => FcStatus::InvalidInput,
        Error::UnsupportedDimension { .. } | Error::GridTooLarge { .. } => FcStatus::Unsupported,
        Error::DegenerateScale | Error::Numerical(_) => FcStatus::Numerical,
    }
}

fn null_pointer(what: &str) -> FcStatus {
    remember_error(&format!("{what} is null"));
    FcStatus::NullPointer
}

/// Growable collection of measurements (opaque).
pub struct FcMeasurementSet {
    measurements: Vec<Measurement>,
}

/// Finished consensus run (opaque): zones, depth, estimate and the
/// member/outlier split at the `min_depth` the run was asked for.
pub struct FcConsensusResult {
    result: ConsensusResult,
    classification: Classification,
}

/// Tool version as a static string; do not free.
#[no_mangle]
pub extern "C" fn fc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent error on this thread; caller frees with
/// `fc_string_free`. Empty string when no error was recorded yet.
#[no_mangle]
pub extern "C" fn fc_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| slot.borrow().clone().into_raw())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must have been returned by a function of this library and not freed
/// before.
#[no_mangle]
pub unsafe extern "C" fn fc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn fc_measurement_set_new() -> *mut FcMeasurementSet {
    Box::into_raw(Box::new(FcMeasurementSet {
        measurements: Vec::new(),
    }))
}

/// # Safety
/// `set` must come from `fc_measurement_set_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fc_measurement_set_free(set: *mut FcMeasurementSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Appends a `dim`-dimensional measurement; `values` and `errors` point to
/// `dim` doubles each.
///
/// # Safety
/// `set` must be a live set; `id` a NUL-terminated string; `values` and
/// `errors` readable arrays of length `dim`.
#[no_mangle]
pub unsafe extern "C" fn fc_measurement_set_push(
    set: *mut FcMeasurementSet,
    id: *const c_char,
    values: *const f64,
    errors: *const f64,
    dim: usize,
    weight: f64,
) -> FcStatus {
    let Some(set) = set.as_mut() else {
        return null_pointer("set");
    };
    if id.is_null() {
        return null_pointer("id");
    }
    if values.is_null() {
        return null_pointer("values");
    }
    if errors.is_null() {
        return null_pointer("errors");
    }
    let id = match CStr::from_ptr(id).to_str() {
        Ok(s) => s.to_string(),
        Err(_) => {
            remember_error("id is not valid UTF-8");
            return FcStatus::InvalidInput;
        }
    };
    let values = std::slice::from_raw_parts(values, dim).to_vec();
    let errors = std::slice::from_raw_parts(errors, dim).to_vec();
    match Measurement::new(id, values, errors, weight) {
        Ok(m) => {
            set.measurements.push(m);
            FcStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Appends a one-dimensional, weight-1 measurement.
///
/// # Safety
/// `set` must be a live set; `id` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fc_measurement_set_push_1d(
    set: *mut FcMeasurementSet,
    id: *const c_char,
    value: f64,
    error: f64,
) -> FcStatus {
    fc_measurement_set_push(set, id, &value, &error, 1, 1.0)
}

/// # Safety
/// `set` must be a live set.
#[no_mangle]
pub unsafe extern "C" fn fc_measurement_set_len(set: *const FcMeasurementSet) -> usize {
    set.as_ref().map_or(0, |s| s.measurements.len())
}

unsafe fn finish_consensus(
    set: *const FcMeasurementSet,
    min_depth: f64,
    out: *mut *mut FcConsensusResult,
    run: impl FnOnce(&[Measurement]) -> fuzzy_consensus::Result<ConsensusResult>,
) -> FcStatus {
    let Some(set) = set.as_ref() else {
        return null_pointer("set");
    };
    if out.is_null() {
        return null_pointer("out");
    }
    match run(&set.measurements) {
        Ok(result) => {
            let classification = classify(&set.measurements, &result, min_depth);
            *out = Box::into_raw(Box::new(FcConsensusResult {
                result,
                classification,
            }));
            FcStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Exact crisp consensus (1D or 2D).
///
/// # Safety
/// `set` must be a live set; `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn fc_consensus_crisp(
    set: *const FcMeasurementSet,
    min_depth: f64,
    out: *mut *mut FcConsensusResult,
) -> FcStatus {
    finish_consensus(set, min_depth, out, consensus_crisp)
}

/// Fuzzy 1D consensus at the given membership threshold (use 1.0 for the
/// default behaviour).
///
/// # Safety
/// `set` must be a live set; `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn fc_consensus_fuzzy_1d(
    set: *const FcMeasurementSet,
    membership_threshold: f64,
    min_depth: f64,
    out: *mut *mut FcConsensusResult,
) -> FcStatus {
    finish_consensus(set, min_depth, out, |ms| {
        consensus_fuzzy_1d(ms, membership_threshold)
    })
}

/// Grid-search crisp consensus for any dimension.
///
/// # Safety
/// `set` must be a live set; `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn fc_consensus_grid(
    set: *const FcMeasurementSet,
    resolution: usize,
    min_depth: f64,
    out: *mut *mut FcConsensusResult,
) -> FcStatus {
    finish_consensus(set, min_depth, out, |ms| {
        consensus_grid(ms, resolution, DepthMode::Crisp)
    })
}

/// # Safety
/// `result` must come from a consensus call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fc_result_free(result: *mut FcConsensusResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be a live result.
#[no_mangle]
pub unsafe extern "C" fn fc_result_depth(result: *const FcConsensusResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.result.depth)
}

/// # Safety
/// `result` must be a live result.
#[no_mangle]
pub unsafe extern "C" fn fc_result_dim(result: *const FcConsensusResult) -> usize {
    result.as_ref().map_or(0, |r| r.result.point_estimate.len())
}

/// # Safety
/// `result` must be a live result.
#[no_mangle]
pub unsafe extern "C" fn fc_result_zone_count(result: *const FcConsensusResult) -> usize {
    result.as_ref().map_or(0, |r| r.result.zones.len())
}

/// Bounds of zone `index` along axis `k`.
///
/// # Safety
/// `result` must be a live result; `out_lo`/`out_hi` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fc_result_zone(
    result: *const FcConsensusResult,
    index: usize,
    k: usize,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> FcStatus {
    let Some(r) = result.as_ref() else {
        return null_pointer("result");
    };
    if out_lo.is_null() || out_hi.is_null() {
        return null_pointer("out_lo/out_hi");
    }
    let Some(zone) = r.result.zones.get(index) else {
        remember_error(&format!("zone index {index} out of range"));
        return FcStatus::InvalidInput;
    };
    if k >= zone.dim() {
        remember_error(&format!("axis {k} out of range"));
        return FcStatus::InvalidInput;
    }
    *out_lo = zone.interval(k).lo();
    *out_hi = zone.interval(k).hi();
    FcStatus::Ok
}

/// Coordinate `k` of the point estimate.
///
/// # Safety
/// `result` must be a live result; `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn fc_result_estimate(
    result: *const FcConsensusResult,
    k: usize,
    out: *mut f64,
) -> FcStatus {
    let Some(r) = result.as_ref() else {
        return null_pointer("result");
    };
    if out.is_null() {
        return null_pointer("out");
    }
    let Some(&v) = r.result.point_estimate.get(k) else {
        remember_error(&format!("axis {k} out of range"));
        return FcStatus::InvalidInput;
    };
    *out = v;
    FcStatus::Ok
}

/// Whether the run fell below the requested minimum depth.
///
/// # Safety
/// `result` must be a live result.
#[no_mangle]
pub unsafe extern "C" fn fc_result_no_consensus(result: *const FcConsensusResult) -> bool {
    result.as_ref().is_some_and(|r| r.classification.no_consensus)
}

/// # Safety
/// `result` must be a live result.
#[no_mangle]
pub unsafe extern "C" fn fc_result_member_count(result: *const FcConsensusResult) -> usize {
    result.as_ref().map_or(0, |r| r.classification.consistent.len())
}

/// # Safety
/// `result` must be a live result.
#[no_mangle]
pub unsafe extern "C" fn fc_result_outlier_count(result: *const FcConsensusResult) -> usize {
    result.as_ref().map_or(0, |r| r.classification.erroneous.len())
}

unsafe fn id_at(ids: Option<&Vec<String>>, index: usize) -> *mut c_char {
    ids.and_then(|ids| ids.get(index))
        .and_then(|id| CString::new(id.as_str()).ok())
        .map_or(std::ptr::null_mut(), CString::into_raw)
}

/// Id of the `index`-th member; caller frees with `fc_string_free`. Null if
/// out of range.
///
/// # Safety
/// `result` must be a live result.
#[no_mangle]
pub unsafe extern "C" fn fc_result_member_id(
    result: *const FcConsensusResult,
    index: usize,
) -> *mut c_char {
    id_at(result.as_ref().map(|r| &r.classification.consistent), index)
}

/// Id of the `index`-th outlier; caller frees with `fc_string_free`. Null if
/// out of range.
///
/// # Safety
/// `result` must be a live result.
#[no_mangle]
pub unsafe extern "C" fn fc_result_outlier_id(
    result: *const FcConsensusResult,
    index: usize,
) -> *mut c_char {
    id_at(result.as_ref().map(|r| &r.classification.erroneous), index)
}

unsafe fn sample_of<'a>(values: *const f64, len: usize) -> Option<&'a [f64]> {
    if values.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(values, len))
    }
}

/// Arithmetic mean of `len` doubles.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_mean(values: *const f64, len: usize, out: *mut f64) -> FcStatus {
    let Some(sample) = sample_of(values, len) else {
        return null_pointer("values");
    };
    if out.is_null() {
        return null_pointer("out");
    }
    match mean(sample) {
        Ok(v) => {
            *out = v;
            FcStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Median of `len` doubles.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_median(values: *const f64, len: usize, out: *mut f64) -> FcStatus {
    let Some(sample) = sample_of(values, len) else {
        return null_pointer("values");
    };
    if out.is_null() {
        return null_pointer("out");
    }
    match median(sample) {
        Ok(v) => {
            *out = v;
            FcStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// M-estimate of location with the chosen weight function at its standard
/// tuning. Falls back to the median on degenerate samples, like the library.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_m_estimate(
    values: *const f64,
    len: usize,
    psi: FcPsi,
    out: *mut f64,
) -> FcStatus {
    let Some(sample) = sample_of(values, len) else {
        return null_pointer("values");
    };
    if out.is_null() {
        return null_pointer("out");
    }
    let psi = match psi {
        FcPsi::Huber => Psi::huber(),
        FcPsi::TukeyBiweight => Psi::tukey(),
        FcPsi::Hampel => Psi::hampel(),
        FcPsi::AndrewsSine => Psi::andrews(),
    };
    match m_estimate(sample, &psi) {
        Ok(est) => {
            *out = est.value;
            FcStatus::Ok
        }
        Err(e) => fail(&e),
    }
}
