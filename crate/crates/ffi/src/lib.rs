//! C interface to `rankone`.
//!
//! Objects are opaque handles created by `ro_*_new*` and released with the
//! matching `ro_*_free`. Every fallible call returns an [`RoStatus`]; on
//! failure the message is kept per thread and read with
//! [`ro_last_error_message`]. Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use rankone::bounds::{bounds_general, bounds_symmetric, BoundSet};
use rankone::polynomial::HomogPoly;
use rankone::random::{kostlan_form, SeedSpec};
use rankone::spectral::{ratio, uniform_norm, MaximizerConfig, Target};
use rankone::{Error, Field, Tensor, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Shape = 3,
    Domain = 4,
    ZeroInput = 5,
    UnsupportedField = 6,
    Budget = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoField {
    Real = 0,
    Complex = 1,
}

impl From<RoField> for Field {
    fn from(f: RoField) -> Field {
        match f {
            RoField::Real => Field::Real,
            RoField::Complex => Field::Complex,
        }
    }
}

/// Lower and upper bound of the best rank-one approximation ratio.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RoBounds {
    pub lower: f64,
    pub upper: f64,
    /// Smallest upper bound among all components.
    pub sharpest_upper: f64,
    /// Nonzero when `upper >= 1`.
    pub vacuous: i32,
}

impl From<&BoundSet> for RoBounds {
    fn from(b: &BoundSet) -> RoBounds {
        RoBounds { lower: b.lower, upper: b.upper, sharpest_upper: b.sharpest_upper, vacuous: i32::from(b.vacuous) }
    }
}

/// Opaque dense tensor.
pub struct RoTensor {
    inner: Tensor,
}

/// Opaque homogeneous polynomial.
pub struct RoPoly {
    inner: HomogPoly,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RoStatus {
    match e {
        Error::Dimension(_) | Error::Shape(_) | Error::Index(_) => RoStatus::Shape,
        Error::Domain(_) => RoStatus::Domain,
        Error::ZeroInput(_) => RoStatus::ZeroInput,
        Error::Field(_) | Error::UnsupportedField(_) => RoStatus::UnsupportedField,
        Error::Budget(_) => RoStatus::Budget,
        _ => RoStatus::InvalidArgument,
    }
}

struct Fail(RoStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RoStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RoStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            RoStatus::Panic
        }
    }
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn maximizer(starts: usize, seed: u64) -> MaximizerConfig {
    let mut cfg = MaximizerConfig::with_seed(seed);
    if starts > 0 {
        cfg.starts = starts;
    }
    cfg
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length without the NUL.
/// Returns 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ro_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ro_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a real tensor from row-major `data` of `prod(shape)` entries.
///
/// # Safety
/// `shape` must point to `order` values and `data` to `len` values.
#[no_mangle]
pub unsafe extern "C" fn ro_tensor_new_real(
    shape: *const usize,
    order: usize,
    data: *const f64,
    len: usize,
    out: *mut *mut RoTensor,
) -> RoStatus {
    guard(|| {
        let shape = input(shape, order, "shape")?.to_vec();
        let data = input(data, len, "data")?.to_vec();
        let t = Tensor::from_real(shape, data)?;
        write(out, Box::into_raw(Box::new(RoTensor { inner: t })), "out")
    })
}

/// Builds a complex tensor from row-major real and imaginary parts.
///
/// # Safety
/// `shape` must point to `order` values, `re` and `im` to `len` values each.
#[no_mangle]
pub unsafe extern "C" fn ro_tensor_new_complex(
    shape: *const usize,
    order: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut RoTensor,
) -> RoStatus {
    guard(|| {
        let shape = input(shape, order, "shape")?.to_vec();
        let re = input(re, len, "re")?;
        let im = input(im, len, "im")?;
        let data = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
        let t = Tensor::new(shape, Field::Complex, data)?;
        write(out, Box::into_raw(Box::new(RoTensor { inner: t })), "out")
    })
}

/// The `n × n` identity matrix.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_tensor_identity(n: usize, out: *mut *mut RoTensor) -> RoStatus {
    guard(|| {
        let t = Tensor::identity(n)?;
        write(out, Box::into_raw(Box::new(RoTensor { inner: t })), "out")
    })
}

/// # Safety
/// `t` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ro_tensor_free(t: *mut RoTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Writes the order of `t` to `out`.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_tensor_order(t: *const RoTensor, out: *mut usize) -> RoStatus {
    guard(|| write(out, deref(t, "tensor")?.inner.order(), "out"))
}

/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_tensor_frobenius_norm(t: *const RoTensor, out: *mut f64) -> RoStatus {
    guard(|| write(out, deref(t, "tensor")?.inner.frobenius_norm(), "out"))
}

/// Multi-start estimate of the spectral norm; `starts == 0` keeps the default.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_tensor_spectral_norm(t: *const RoTensor, starts: usize, seed: u64, out: *mut f64) -> RoStatus {
    guard(|| {
        let t = deref(t, "tensor")?;
        let res = uniform_norm(Target::Tensor(&t.inner), &maximizer(starts, seed))?;
        write(out, res.value, "out")
    })
}

/// Spectral over Frobenius norm.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_tensor_ratio(t: *const RoTensor, starts: usize, seed: u64, out: *mut f64) -> RoStatus {
    guard(|| {
        let t = deref(t, "tensor")?;
        write(out, ratio(Target::Tensor(&t.inner), &maximizer(starts, seed))?, "out")
    })
}

/// Builds a real form in `n` variables of degree `d`; `coeffs` lists the
/// monomial coefficients in graded lexicographic order.
///
/// # Safety
/// `coeffs` must point to `len` values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_poly_new_real(n: usize, d: u32, coeffs: *const f64, len: usize, out: *mut *mut RoPoly) -> RoStatus {
    guard(|| {
        let coeffs = input(coeffs, len, "coeffs")?.to_vec();
        let f = HomogPoly::from_real(n, d, coeffs)?;
        write(out, Box::into_raw(Box::new(RoPoly { inner: f })), "out")
    })
}

/// Draws a Kostlan form from the stream `(seed, index)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_poly_kostlan(d: u32, n: usize, field: RoField, seed: u64, index: u64, out: *mut *mut RoPoly) -> RoStatus {
    guard(|| {
        let f = kostlan_form(d, n, field.into(), &mut SeedSpec::new(seed).rng(index, "sample"))?;
        write(out, Box::into_raw(Box::new(RoPoly { inner: f })), "out")
    })
}

/// # Safety
/// `f` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ro_poly_free(f: *mut RoPoly) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Bombieri–Weyl norm.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_poly_bw_norm(f: *const RoPoly, out: *mut f64) -> RoStatus {
    guard(|| write(out, deref(f, "poly")?.inner.bw_norm(), "out"))
}

/// Multi-start estimate of `max |f|` on the unit sphere of the form's field.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_poly_uniform_norm(f: *const RoPoly, starts: usize, seed: u64, out: *mut f64) -> RoStatus {
    guard(|| {
        let f = deref(f, "poly")?;
        let res = uniform_norm(Target::Poly(&f.inner), &maximizer(starts, seed))?;
        write(out, res.value, "out")
    })
}

/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_poly_ratio(f: *const RoPoly, starts: usize, seed: u64, out: *mut f64) -> RoStatus {
    guard(|| {
        let f = deref(f, "poly")?;
        write(out, ratio(Target::Poly(&f.inner), &maximizer(starts, seed))?, "out")
    })
}

/// Bounds for symmetric tensors of order `d` over `K^n`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_bounds_symmetric(d: u32, n: u32, field: RoField, out: *mut RoBounds) -> RoStatus {
    guard(|| {
        let b = bounds_symmetric(d, n, field.into())?;
        write(out, RoBounds::from(&b), "out")
    })
}

/// Bounds for general tensors of the given shape.
///
/// # Safety
/// `shape` must point to `order` values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ro_bounds_general(shape: *const usize, order: usize, field: RoField, out: *mut RoBounds) -> RoStatus {
    guard(|| {
        let shape = input(shape, order, "shape")?;
        let b = bounds_general(shape, field.into())?;
        write(out, RoBounds::from(&b), "out")
    })
}
