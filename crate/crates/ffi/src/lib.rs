//! C ABI over `opscale`.
//!
//! Tuples live behind the opaque `OpscaleKraus` handle. Every fallible call
//! returns an [`OpscaleStatus`]; on failure a message is available from
//! [`opscale_last_error`] on the same thread until the next failing call.
//! Matrix data crosses the boundary as interleaved `re, im` doubles in
//! row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use opscale::cpmap::{ds_measure, make_sk3, KrausTuple};
use opscale::estimators::{gnorm_mc, qperm_mc, EstimatorResult};
use opscale::qperm::{gnorm_expand, quantum_permanent};
use opscale::scaling::{decide_edmonds_with, DecideOptions, Threshold, Verdict};
use opscale::{ComplexMatrix, Error, Tolerance, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpscaleStatus {
    Ok = 0,
    NullPointer = 1,
    Dimension = 2,
    Singular = 3,
    NotStrictlyPositive = 4,
    NotPsd = 5,
    NotUnitary = 6,
    TooLarge = 7,
    NonFinite = 8,
    Invalid = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpscaleVerdict {
    NonsingularExists = 0,
    NoNonsingular = 1,
    BudgetExhaustedNoNonsingular = 2,
    InconclusiveNumerical = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpscaleEstimator {
    Gnorm = 0,
    Qperm = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpscaleTolerance {
    pub singular_eps: f64,
    pub psd_eps: f64,
    pub agree_rtol: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpscaleDecision {
    pub verdict: OpscaleVerdict,
    pub iterations: u64,
    pub final_ds: f64,
    pub budget: u64,
    /// Nonzero when a nonsingular combination was sampled.
    pub has_witness: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpscaleEstimate {
    pub mean_re: f64,
    pub mean_im: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Opaque Kraus tuple handle.
pub struct OpscaleKraus {
    inner: KrausTuple,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> OpscaleStatus {
    match e {
        Error::Dimension(_) => OpscaleStatus::Dimension,
        Error::Singular { .. } => OpscaleStatus::Singular,
        Error::NotStrictlyPositive { .. } => OpscaleStatus::NotStrictlyPositive,
        Error::NotPsd => OpscaleStatus::NotPsd,
        Error::NotUnitary => OpscaleStatus::NotUnitary,
        Error::TooLarge { .. } => OpscaleStatus::TooLarge,
        Error::NonFinite => OpscaleStatus::NonFinite,
        Error::Invalid(_) => OpscaleStatus::Invalid,
    }
}

enum Fail {
    Null,
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> OpscaleStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OpscaleStatus::Ok,
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument");
            OpscaleStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            OpscaleStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null)
}

fn tolerance(t: Option<&OpscaleTolerance>) -> Result<Tolerance, Fail> {
    match t {
        None => Ok(Tolerance::default()),
        Some(t) => Ok(Tolerance::new(t.singular_eps, t.psd_eps, t.agree_rtol)?),
    }
}

fn store(handle: KrausTuple, out_handle: &mut *mut OpscaleKraus) {
    *out_handle = Box::into_raw(Box::new(OpscaleKraus { inner: handle }));
}

/// Message for the most recent failure on this thread; empty if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn opscale_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn opscale_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Writes the default tolerances.
///
/// # Safety
/// `out_tol` must be null or point to writable memory for one `OpscaleTolerance`.
#[no_mangle]
pub unsafe extern "C" fn opscale_tolerance_default(out_tol: *mut OpscaleTolerance) -> OpscaleStatus {
    guard(|| {
        let d = Tolerance::default();
        *out(out_tol)? = OpscaleTolerance {
            singular_eps: d.singular_eps,
            psd_eps: d.psd_eps,
            agree_rtol: d.agree_rtol,
        };
        Ok(())
    })
}

/// Builds a tuple of `k` matrices of size `n x n` from `2·k·n·n` doubles.
///
/// # Safety
/// `data` must point to `2*k*n*n` readable doubles and `out_handle` to a
/// writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn opscale_kraus_new(
    n: usize,
    k: usize,
    data: *const f64,
    out_handle: *mut *mut OpscaleKraus,
) -> OpscaleStatus {
    guard(|| {
        let slot = out(out_handle)?;
        if data.is_null() {
            return Err(Fail::Null);
        }
        if n == 0 || k == 0 {
            return Err(Error::Dimension("n and k must be at least 1".into()).into());
        }
        let len = n
            .checked_mul(n)
            .and_then(|x| x.checked_mul(k))
            .and_then(|x| x.checked_mul(2))
            .ok_or_else(|| Error::Invalid("size overflow".into()))?;
        let raw = std::slice::from_raw_parts(data, len);
        let mats = raw
            .chunks_exact(2 * n * n)
            .map(|chunk| {
                let entries = chunk.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
                ComplexMatrix::from_row_major(n, n, entries)
            })
            .collect::<opscale::Result<Vec<_>>>()?;
        store(KrausTuple::new(mats)?, slot);
        Ok(())
    })
}

/// Builds the skew-symmetric 3×3 tuple.
///
/// # Safety
/// `out_handle` must point to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn opscale_kraus_sk3(out_handle: *mut *mut OpscaleKraus) -> OpscaleStatus {
    guard(|| {
        store(make_sk3(), out(out_handle)?);
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `handle` must be null or come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn opscale_kraus_free(handle: *mut OpscaleKraus) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Matrix dimension N, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opscale_kraus_n(handle: *const OpscaleKraus) -> usize {
    handle.as_ref().map_or(0, |h| h.inner.n())
}

/// Tuple length k, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opscale_kraus_k(handle: *const OpscaleKraus) -> usize {
    handle.as_ref().map_or(0, |h| h.inner.k())
}

/// ‖T(I) − I‖² + ‖T*(I) − I‖².
///
/// # Safety
/// `handle` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn opscale_ds_measure(handle: *const OpscaleKraus, out_value: *mut f64) -> OpscaleStatus {
    guard(|| {
        let h = deref(handle)?;
        *out(out_value)? = ds_measure(&h.inner);
        Ok(())
    })
}

/// Quantum permanent of the Choi matrix (N ≤ 6).
///
/// # Safety
/// `handle` must be a live handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn opscale_quantum_permanent(
    handle: *const OpscaleKraus,
    re: *mut f64,
    im: *mut f64,
) -> OpscaleStatus {
    guard(|| {
        let h = deref(handle)?;
        let (re, im) = (out(re)?, out(im)?);
        let z = quantum_permanent(h.inner.choi().matrix())?;
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Squared G-norm of det(Σ x_i A_i) from the exact monomial expansion.
///
/// # Safety
/// `handle` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn opscale_gnorm(handle: *const OpscaleKraus, out_value: *mut f64) -> OpscaleStatus {
    guard(|| {
        let h = deref(handle)?;
        let slot = out(out_value)?;
        *slot = gnorm_expand(&h.inner)?.1;
        Ok(())
    })
}

/// Scaling decision. `tol` may be null for defaults; a negative
/// `budget_override` selects the default budget; nonzero `strict` uses the
/// 1/(2N+1) threshold.
///
/// # Safety
/// `handle` must be a live handle, `tol` null or readable, `out_decision` writable.
#[no_mangle]
pub unsafe extern "C" fn opscale_decide(
    handle: *const OpscaleKraus,
    tol: *const OpscaleTolerance,
    budget_override: i64,
    strict: i32,
    out_decision: *mut OpscaleDecision,
) -> OpscaleStatus {
    guard(|| {
        let h = deref(handle)?;
        let slot = out(out_decision)?;
        let tol = tolerance(tol.as_ref())?;
        let opts = DecideOptions {
            budget_override: u64::try_from(budget_override).ok(),
            threshold: if strict != 0 { Threshold::Strict } else { Threshold::InverseN },
            ..DecideOptions::default()
        };
        let r = decide_edmonds_with(&h.inner, &tol, &opts);
        *slot = OpscaleDecision {
            verdict: match r.verdict {
                Verdict::NonsingularExists => OpscaleVerdict::NonsingularExists,
                Verdict::NoNonsingular => OpscaleVerdict::NoNonsingular,
                Verdict::BudgetExhaustedNoNonsingular => OpscaleVerdict::BudgetExhaustedNoNonsingular,
                Verdict::InconclusiveNumerical => OpscaleVerdict::InconclusiveNumerical,
            },
            iterations: r.iterations,
            final_ds: r.final_ds,
            budget: r.budget,
            has_witness: r.witness.is_some() as i32,
        };
        Ok(())
    })
}

fn estimate(r: &EstimatorResult) -> OpscaleEstimate {
    OpscaleEstimate {
        mean_re: r.mean.re,
        mean_im: r.mean.im,
        std_error: r.std_error,
        samples: r.samples,
        seed: r.seed,
    }
}

/// Monte-Carlo estimate of the G-norm or the quantum permanent.
///
/// # Safety
/// `handle` must be a live handle and `out_estimate` writable.
#[no_mangle]
pub unsafe extern "C" fn opscale_estimate(
    handle: *const OpscaleKraus,
    kind: OpscaleEstimator,
    samples: u64,
    seed: u64,
    out_estimate: *mut OpscaleEstimate,
) -> OpscaleStatus {
    guard(|| {
        let h = deref(handle)?;
        let slot = out(out_estimate)?;
        *slot = match kind {
            OpscaleEstimator::Gnorm => estimate(&gnorm_mc(&h.inner, samples, seed)?),
            OpscaleEstimator::Qperm => estimate(&qperm_mc(&h.inner, samples, seed)?.estimate),
        };
        Ok(())
    })
}
