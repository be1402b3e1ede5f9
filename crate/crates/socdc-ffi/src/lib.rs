//! C ABI for socdc.
//!
//! Instances and cuts are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every entry point returns a
//! [`SocdcStatus`]; on failure [`socdc_last_error_message`] describes the
//! error for the calling thread. Matrices cross the boundary row-major.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, size_t};
use nalgebra::{DMatrix, DVector};

use socdc::applications::{trs_solve, TrsProblem};
use socdc::conditions::Overall;
use socdc::cutgen::{build_cut, ConeInstance, CutResult};
use socdc::io::{self, InstanceFile};
use socdc::{Error, Options, SymMatrix};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SocdcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    /// A sufficient condition failed or a precondition was not met.
    ConditionFailed = 3,
    Indeterminate = 4,
    Numerical = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SocdcVerdict {
    Verified = 0,
    Indeterminate = 1,
    Failed = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SocdcOptions {
    pub tol: f64,
    pub seed: u64,
    pub budget: size_t,
    pub samples: size_t,
}

impl From<SocdcOptions> for Options {
    fn from(o: SocdcOptions) -> Self {
        Options {
            tol: o.tol,
            seed: o.seed,
            budget: o.budget,
            samples: o.samples,
        }
    }
}

impl From<Options> for SocdcOptions {
    fn from(o: Options) -> Self {
        SocdcOptions {
            tol: o.tol,
            seed: o.seed,
            budget: o.budget,
            samples: o.samples,
        }
    }
}

/// Opaque instance handle.
pub struct SocdcInstance {
    inner: ConeInstance,
}

/// Opaque cut handle.
pub struct SocdcCut {
    inner: CutResult,
    tol: f64,
}

struct Fail {
    status: SocdcStatus,
    message: String,
}

impl Fail {
    fn new(status: SocdcStatus, message: impl Into<String>) -> Self {
        Fail {
            status,
            message: message.into(),
        }
    }

    fn null(what: &str) -> Self {
        Fail::new(SocdcStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match io::exit_code_error(&e) {
            1 => SocdcStatus::InvalidInput,
            2 => SocdcStatus::ConditionFailed,
            3 => SocdcStatus::Indeterminate,
            _ => SocdcStatus::Numerical,
        };
        Fail::new(status, format!("{}: {e}", e.code()))
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> SocdcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SocdcStatus::Ok,
        Ok(Err(fail)) => {
            set_error(&fail.message);
            fail.status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            SocdcStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(Fail::null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn square(p: *const f64, n: usize, what: &str) -> Result<SymMatrix, Fail> {
    let s = slice(p, n * n, what)?;
    Ok(SymMatrix::new(DMatrix::from_row_slice(n, n, s))?)
}

unsafe fn options(p: *const SocdcOptions) -> Options {
    if p.is_null() {
        Options::default()
    } else {
        (*p).into()
    }
}

unsafe fn write_out(src: &[f64], out: *mut f64, len: size_t, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::null(what));
    }
    if len < src.len() {
        return Err(Fail::new(
            SocdcStatus::BufferTooSmall,
            format!("{what} needs {} doubles, got {len}", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().iter().copied().collect()
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn socdc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn socdc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[no_mangle]
pub extern "C" fn socdc_options_default() -> SocdcOptions {
    Options::default().into()
}

/// Build an instance from row-major `n × n` matrices `a0` and `a1`. `h` may
/// be null (homogeneous instance) or point to `n` doubles; `opts` may be
/// null for defaults.
///
/// # Safety
/// Non-null pointers must be valid for the stated number of elements.
#[no_mangle]
pub unsafe extern "C" fn socdc_instance_new(
    n: size_t,
    a0: *const f64,
    a1: *const f64,
    h: *const f64,
    opts: *const SocdcOptions,
    out: *mut *mut SocdcInstance,
) -> SocdcStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::null("out"));
        }
        *out = ptr::null_mut();
        if n == 0 {
            return Err(Fail::new(SocdcStatus::InvalidInput, "n must be positive"));
        }
        let a0 = square(a0, n, "a0")?;
        let a1 = square(a1, n, "a1")?;
        let h = if h.is_null() {
            None
        } else {
            Some(DVector::from_column_slice(slice(h, n, "h")?))
        };
        let inner = ConeInstance::from_matrices(a0, a1, h, options(opts))?;
        *out = Box::into_raw(Box::new(SocdcInstance { inner }));
        Ok(())
    })
}

/// Build an instance from the JSON instance format used by the CLI.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn socdc_instance_from_json(json: *const c_char, out: *mut *mut SocdcInstance) -> SocdcStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::null("out"));
        }
        *out = ptr::null_mut();
        if json.is_null() {
            return Err(Fail::null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Fail::new(SocdcStatus::InvalidInput, "json is not UTF-8"))?;
        let f = InstanceFile::parse(text)?;
        let inner = f.to_instance(f.options)?;
        *out = Box::into_raw(Box::new(SocdcInstance { inner }));
        Ok(())
    })
}

/// Dimension of the instance, 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn socdc_instance_dim(inst: *const SocdcInstance) -> size_t {
    inst.as_ref().map_or(0, |i| i.inner.dim())
}

/// # Safety
/// `inst` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn socdc_instance_free(inst: *mut SocdcInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Run the condition checks and compute the cut. A cut is returned even
/// when a later condition fails; inspect [`socdc_cut_verdict`].
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn socdc_build_cut(inst: *const SocdcInstance, out: *mut *mut SocdcCut) -> SocdcStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::null("out"));
        }
        *out = ptr::null_mut();
        let inst = inst.as_ref().ok_or_else(|| Fail::null("inst"))?;
        let inner = build_cut(&inst.inner)?;
        *out = Box::into_raw(Box::new(SocdcCut {
            inner,
            tol: inst.inner.opts.tol,
        }));
        Ok(())
    })
}

/// # Safety
/// `cut` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn socdc_cut_free(cut: *mut SocdcCut) {
    if !cut.is_null() {
        drop(Box::from_raw(cut));
    }
}

/// The pencil parameter `s`, NaN for a null handle.
///
/// # Safety
/// `cut` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn socdc_cut_s(cut: *const SocdcCut) -> f64 {
    cut.as_ref().map_or(f64::NAN, |c| c.inner.s)
}

/// # Safety
/// `cut` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn socdc_cut_dim(cut: *const SocdcCut) -> size_t {
    cut.as_ref().map_or(0, |c| c.inner.a_s.dim())
}

/// Whether the cut degenerated to the halfspace `b_sᵀx ≥ 0`.
///
/// # Safety
/// `cut` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn socdc_cut_is_halfspace(cut: *const SocdcCut) -> bool {
    cut.as_ref().is_some_and(|c| c.inner.is_halfspace())
}

/// # Safety
/// `cut` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn socdc_cut_verdict(cut: *const SocdcCut) -> SocdcVerdict {
    match cut.as_ref().map(|c| c.inner.report.overall()) {
        Some(Overall::Verified) => SocdcVerdict::Verified,
        Some(Overall::Indeterminate) => SocdcVerdict::Indeterminate,
        Some(Overall::Failed) | None => SocdcVerdict::Failed,
    }
}

/// Number of columns of `B_s`.
///
/// # Safety
/// `cut` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn socdc_cut_bs_cols(cut: *const SocdcCut) -> size_t {
    cut.as_ref().and_then(|c| c.inner.cone()).map_or(0, |c| c.b_mat().ncols())
}

/// Copy `A_s` (row-major, `n²` doubles) into `out`.
///
/// # Safety
/// `out` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn socdc_cut_as(cut: *const SocdcCut, out: *mut f64, len: size_t) -> SocdcStatus {
    guard(|| {
        let cut = cut.as_ref().ok_or_else(|| Fail::null("cut"))?;
        write_out(&row_major(cut.inner.a_s.matrix()), out, len, "A_s")
    })
}

/// Copy `b_s` (`n` doubles) into `out`.
///
/// # Safety
/// `out` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn socdc_cut_bs(cut: *const SocdcCut, out: *mut f64, len: size_t) -> SocdcStatus {
    guard(|| {
        let cut = cut.as_ref().ok_or_else(|| Fail::null("cut"))?;
        let cone = cut.inner.cone().ok_or_else(|| Fail::new(SocdcStatus::ConditionFailed, "cut has no cone"))?;
        write_out(cone.b().as_slice(), out, len, "b_s")
    })
}

/// Copy `B_s` (row-major, `n × socdc_cut_bs_cols` doubles) into `out`.
///
/// # Safety
/// `out` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn socdc_cut_big_bs(cut: *const SocdcCut, out: *mut f64, len: size_t) -> SocdcStatus {
    guard(|| {
        let cut = cut.as_ref().ok_or_else(|| Fail::null("cut"))?;
        let cone = cut.inner.cone().ok_or_else(|| Fail::new(SocdcStatus::ConditionFailed, "cut has no cone"))?;
        write_out(&row_major(cone.b_mat()), out, len, "B_s")
    })
}

/// Whether `x` satisfies the cut within `tol`, written to `inside`.
///
/// # Safety
/// `x` must be valid for `n` doubles, `inside` for one bool.
#[no_mangle]
pub unsafe extern "C" fn socdc_cut_contains(
    cut: *const SocdcCut,
    x: *const f64,
    n: size_t,
    tol: f64,
    inside: *mut bool,
) -> SocdcStatus {
    guard(|| {
        let cut = cut.as_ref().ok_or_else(|| Fail::null("cut"))?;
        if inside.is_null() {
            return Err(Fail::null("inside"));
        }
        let cone = cut.inner.cone().ok_or_else(|| Fail::new(SocdcStatus::ConditionFailed, "cut has no cone"))?;
        if n != cone.dim() {
            return Err(Error::Dimension(format!("x has {n} entries, cut has {}", cone.dim())).into());
        }
        let x = DVector::from_column_slice(slice(x, n, "x")?);
        *inside = cone.contains(&x, tol);
        Ok(())
    })
}

/// The cut as a JSON document, same layout as `socdc cut`. Release with
/// [`socdc_string_free`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn socdc_cut_to_json(cut: *const SocdcCut, out: *mut *mut c_char) -> SocdcStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::null("out"));
        }
        *out = ptr::null_mut();
        let cut = cut.as_ref().ok_or_else(|| Fail::null("cut"))?;
        let text = io::to_json_string(&io::cut_value(&cut.inner, cut.tol));
        let c = CString::new(text).map_err(|_| Fail::new(SocdcStatus::Numerical, "JSON contains NUL"))?;
        *out = c.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn socdc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Minimize `yᵀQy + 2gᵀy` over `‖y‖ ≤ 1`. `q` is row-major `m × m`, `g`
/// and `y` have `m` entries. `opts` may be null.
///
/// # Safety
/// Pointers must be valid for the stated number of elements.
#[no_mangle]
pub unsafe extern "C" fn socdc_trs_solve(
    m: size_t,
    q: *const f64,
    g: *const f64,
    opts: *const SocdcOptions,
    value: *mut f64,
    y: *mut f64,
) -> SocdcStatus {
    guard(|| {
        if value.is_null() {
            return Err(Fail::null("value"));
        }
        if m == 0 {
            return Err(Fail::new(SocdcStatus::InvalidInput, "m must be positive"));
        }
        let q = square(q, m, "q")?;
        let g = DVector::from_column_slice(slice(g, m, "g")?);
        let sol = trs_solve(&TrsProblem::new(q, g)?, options(opts))?;
        write_out(sol.y.as_slice(), y, m, "y")?;
        *value = sol.value;
        Ok(())
    })
}
