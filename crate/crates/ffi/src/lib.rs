//! C ABI for `mcycle`.
//!
//! Objects cross the boundary as opaque handles created by `mc_*_new` or
//! `mc_*` constructors and released with the matching `mc_*_free`. Every
//! fallible function returns an `int` status: `MC_OK` on success, a
//! positive library error code (see the `MC_ERR_*` constants) for domain
//! errors and a negative value for misuse of the interface. The message of
//! the last failure on the calling thread is available from
//! [`mc_last_error_message`].
//!
//! Strings returned by the library are owned by the caller and must be
//! released with [`mc_string_free`].
//!
//! # Safety
//!
//! Null pointers are detected and reported as `MC_ERR_NULL_POINTER`. Any
//! other pointer must be valid for the access the function performs, and
//! handles must not be used after they are freed.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mcycle::arith::{QuadVal, Rat};
use mcycle::cycle::{conjugate_swap, regulator_h4, RegulatorResult};
use mcycle::geometry::{is_tangent, Conic, ProjLine};
use mcycle::greens::{green_k, hecke_green, GreensValue, TruncationPolicy, UHPoint};
use mcycle::kummer::{humbert5_conic, humbert5_discriminant, ModuliParams};
use mcycle::Error;

pub const MC_OK: c_int = 0;
pub const MC_ERR_NULL_POINTER: c_int = -1;
pub const MC_ERR_INVALID_UTF8: c_int = -2;
pub const MC_ERR_PANIC: c_int = -3;

pub const MC_ERR_DEGENERATE_QUADRATIC: c_int = 1;
pub const MC_ERR_INSUFFICIENT_PRECISION: c_int = 2;
pub const MC_ERR_INCOMPATIBLE_RADICANDS: c_int = 3;
pub const MC_ERR_LEAVES_QUADRATIC_CLOSURE: c_int = 4;
pub const MC_ERR_DEGENERATE_CONFIGURATION: c_int = 5;
pub const MC_ERR_LINE_ON_CONIC: c_int = 6;
pub const MC_ERR_INVALID_MODULI: c_int = 7;
pub const MC_ERR_CLOSED_FORM_MISMATCH: c_int = 8;
pub const MC_ERR_NOT_ON_H4: c_int = 9;
pub const MC_ERR_ON_H5_LOCUS: c_int = 10;
pub const MC_ERR_NON_TRANSVERSAL: c_int = 11;
pub const MC_ERR_ZERO_DENOMINATOR: c_int = 12;
pub const MC_ERR_POLE_EVALUATION: c_int = 13;
pub const MC_ERR_REPEATED_ROOT: c_int = 14;
pub const MC_ERR_BRANCH_AT_RAMIFICATION: c_int = 15;
pub const MC_ERR_INCOMPATIBLE_MODULES: c_int = 16;
pub const MC_ERR_SINGULAR_ARGUMENT: c_int = 17;
pub const MC_ERR_ON_SINGULAR_LOCUS: c_int = 18;
pub const MC_ERR_BUDGET_EXCEEDED: c_int = 19;
pub const MC_ERR_DIVISION_BY_ZERO: c_int = 20;
pub const MC_ERR_PARSE: c_int = 21;
pub const MC_ERR_INVALID_ARGUMENT: c_int = 22;

/// Moduli point `(a1, a2, a3)`.
pub struct McModuli(ModuliParams);

/// Conic `p1 x² + p2 y² + p3 z² + p4 xy + p5 xz + p6 yz`.
pub struct McConic(Conic);

/// Output of the regulator pipeline.
pub struct McRegulator(RegulatorResult);

/// A Green's function value with its tail estimate.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct McGreensValue {
    pub value: c_double,
    /// Truncation estimate.
    pub tail: c_double,
    /// Tail plus rounding radius.
    pub error_budget: c_double,
    pub terms_summed: u64,
    pub matrix_bound: u64,
}

impl From<&GreensValue> for McGreensValue {
    fn from(g: &GreensValue) -> Self {
        McGreensValue {
            value: g.value_f64(),
            tail: g.tail_f64(),
            error_budget: g.error_budget(),
            terms_summed: g.terms_summed,
            matrix_bound: g.matrix_bound,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Null,
    Utf8,
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MC_OK
        }
        Ok(Err(Fail::Null)) => {
            set_last_error("null pointer argument");
            MC_ERR_NULL_POINTER
        }
        Ok(Err(Fail::Utf8)) => {
            set_last_error("string argument is not valid UTF-8");
            MC_ERR_INVALID_UTF8
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(&e.to_string());
            e.code()
        }
        Err(_) => {
            set_last_error("internal panic");
            MC_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| Fail::Utf8)
}

unsafe fn rat_arg(p: *const c_char) -> Result<Rat, Fail> {
    Ok(Rat::parse(unsafe { str_arg(p) }?)?)
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or(Fail::Null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    unsafe { out.write(v) };
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn json_err(e: serde_json::Error) -> Fail {
    Fail::Lib(Error::Parse(e.to_string()))
}

/// Message of the last failure on this thread, or null after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn mc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn mc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Creates a moduli point from three rationals written `p/q` or as decimals.
///
/// # Safety
/// The strings must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mc_moduli_new(
    a1: *const c_char,
    a2: *const c_char,
    a3: *const c_char,
    out: *mut *mut McModuli,
) -> c_int {
    guard(|| {
        let p = ModuliParams::from_rats(unsafe { rat_arg(a1) }?, unsafe { rat_arg(a2) }?, unsafe { rat_arg(a3) }?)?;
        unsafe { put(out, Box::into_raw(Box::new(McModuli(p)))) }
    })
}

/// # Safety
/// `p` must be null or a handle from [`mc_moduli_new`].
#[no_mangle]
pub unsafe extern "C" fn mc_moduli_free(p: *mut McModuli) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Writes 1 to `out` when `a2 = a1 a3`, else 0.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mc_moduli_on_h4(p: *const McModuli, out: *mut c_int) -> c_int {
    guard(|| {
        let p = &unsafe { handle(p) }?.0;
        let on = p.a1.try_mul(&p.a3)? == p.a2;
        unsafe { put(out, on as c_int) }
    })
}

/// Writes 1 to `out` when the Δ = 5 conic is tangent to the line at infinity.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mc_moduli_on_h5(p: *const McModuli, out: *mut c_int) -> c_int {
    guard(|| {
        let d = humbert5_discriminant(&unsafe { handle(p) }?.0)?;
        unsafe { put(out, d.is_zero() as c_int) }
    })
}

/// The conic through q12, q23, q34, q45, q51.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mc_humbert5_conic(p: *const McModuli, out: *mut *mut McConic) -> c_int {
    guard(|| {
        let c = humbert5_conic(&unsafe { handle(p) }?.0)?;
        unsafe { put(out, Box::into_raw(Box::new(McConic(c)))) }
    })
}

/// # Safety
/// `c` must be null or a handle from [`mc_humbert5_conic`].
#[no_mangle]
pub unsafe extern "C" fn mc_conic_free(c: *mut McConic) {
    if !c.is_null() {
        drop(unsafe { Box::from_raw(c) });
    }
}

/// Writes the six coefficients as doubles. Coefficients with a
/// radical part are written as their real value.
///
/// # Safety
/// `c` must be a live handle and `out` writable for six doubles.
#[no_mangle]
pub unsafe extern "C" fn mc_conic_coeffs_f64(c: *const McConic, out: *mut c_double) -> c_int {
    guard(|| {
        let c = &unsafe { handle(c) }?.0;
        if out.is_null() {
            return Err(Fail::Null);
        }
        for (i, v) in c.to_f64().iter().enumerate() {
            unsafe { out.add(i).write(*v) };
        }
        Ok(())
    })
}

/// Exact tangency test with the line `alpha x + beta y + gamma z = 0`.
///
/// # Safety
/// `c` must be a live handle, the strings NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mc_conic_is_tangent(
    c: *const McConic,
    alpha: *const c_char,
    beta: *const c_char,
    gamma: *const c_char,
    out: *mut c_int,
) -> c_int {
    guard(|| {
        let c = &unsafe { handle(c) }?.0;
        let q = |s| -> Result<QuadVal, Fail> { Ok(QuadVal::from_rat(unsafe { rat_arg(s) }?)) };
        let l = ProjLine::new(q(alpha)?, q(beta)?, q(gamma)?)?;
        unsafe { put(out, is_tangent(c, &l)? as c_int) }
    })
}

/// Exact JSON of the conic. Release the string with [`mc_string_free`].
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mc_conic_to_json(c: *const McConic, out: *mut *mut c_char) -> c_int {
    guard(|| {
        let s = serde_json::to_string(&unsafe { handle(c) }?.0).map_err(json_err)?;
        unsafe { put(out, into_c_string(s)) }
    })
}

/// Regulator pipeline at `(a1, a1 a3, a3)` with `precision` digits.
///
/// # Safety
/// The strings must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mc_regulator_h4(
    a1: *const c_char,
    a3: *const c_char,
    precision: u32,
    recognize: c_int,
    out: *mut *mut McRegulator,
) -> c_int {
    guard(|| {
        let r = regulator_h4(&unsafe { rat_arg(a1) }?, &unsafe { rat_arg(a3) }?, precision, recognize != 0)?;
        unsafe { put(out, Box::into_raw(Box::new(McRegulator(r)))) }
    })
}

/// # Safety
/// `r` must be null or a regulator handle.
#[no_mangle]
pub unsafe extern "C" fn mc_regulator_free(r: *mut McRegulator) {
    if !r.is_null() {
        drop(unsafe { Box::from_raw(r) });
    }
}

/// Result with the two sheets of the cover exchanged (ratio `1/R`).
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mc_regulator_conjugate_swap(r: *const McRegulator, out: *mut *mut McRegulator) -> c_int {
    guard(|| {
        let s = conjugate_swap(&unsafe { handle(r) }?.0);
        unsafe { put(out, Box::into_raw(Box::new(McRegulator(s)))) }
    })
}

/// `log|R|` and the real and imaginary parts of `R` as doubles.
///
/// # Safety
/// `r` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn mc_regulator_values(
    r: *const McRegulator,
    log_abs: *mut c_double,
    ratio_re: *mut c_double,
    ratio_im: *mut c_double,
) -> c_int {
    guard(|| {
        let r = &unsafe { handle(r) }?.0;
        unsafe {
            put(log_abs, r.log_abs.to_f64())?;
            put(ratio_re, r.ratio.re.to_f64())?;
            put(ratio_im, r.ratio.im.to_f64())
        }
    })
}

/// Certified correct digits of the result.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mc_regulator_digits(r: *const McRegulator, out: *mut u32) -> c_int {
    guard(|| unsafe { put(out, handle(r)?.0.digits) })
}

/// `log|R|` as a decimal string with `sig_digits` significant digits.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mc_regulator_log_abs_string(
    r: *const McRegulator,
    sig_digits: u32,
    out: *mut *mut c_char,
) -> c_int {
    guard(|| {
        let r = &unsafe { handle(r) }?.0;
        unsafe { put(out, into_c_string(r.log_abs.to_decimal(sig_digits as usize))) }
    })
}

/// Lossless JSON of the full result.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mc_regulator_to_json(r: *const McRegulator, out: *mut *mut c_char) -> c_int {
    guard(|| {
        let s = serde_json::to_string(&unsafe { handle(r) }?.0).map_err(json_err)?;
        unsafe { put(out, into_c_string(s)) }
    })
}

fn points(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<(UHPoint, UHPoint), Fail> {
    Ok((UHPoint::from_f64(x1, y1)?, UHPoint::from_f64(x2, y2)?))
}

/// `G_k(z1, z2)` with entries of the enumerated matrices bounded by `bound`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mc_green_k(
    k: u32,
    z1_re: c_double,
    z1_im: c_double,
    z2_re: c_double,
    z2_im: c_double,
    bound: u64,
    out: *mut McGreensValue,
) -> c_int {
    guard(|| {
        let (z1, z2) = points(z1_re, z1_im, z2_re, z2_im)?;
        let g = green_k(k, &z1, &z2, &TruncationPolicy::with_bound(bound))?;
        unsafe { put(out, McGreensValue::from(&g)) }
    })
}

/// Hecke translate `G_s^m(z1, z2)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mc_hecke_green(
    s: u32,
    m: u64,
    z1_re: c_double,
    z1_im: c_double,
    z2_re: c_double,
    z2_im: c_double,
    bound: u64,
    out: *mut McGreensValue,
) -> c_int {
    guard(|| {
        let (z1, z2) = points(z1_re, z1_im, z2_re, z2_im)?;
        let g = hecke_green(s, m, &z1, &z2, &TruncationPolicy::with_bound(bound))?;
        unsafe { put(out, McGreensValue::from(&g)) }
    })
}

/// Runs a command-line invocation (`argv[0]` is the program name) and
/// writes its JSON document to `out`. Returns the command's exit status
/// (0, 1 or 2), or a negative status on interface misuse.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn mc_cli_run(argc: c_int, argv: *const *const c_char, out: *mut *mut c_char) -> c_int {
    let mut exit = MC_OK;
    let status = guard(|| {
        if argv.is_null() || out.is_null() || argc < 0 {
            return Err(Fail::Null);
        }
        let mut args = Vec::with_capacity(argc as usize);
        for i in 0..argc as usize {
            args.push(unsafe { str_arg(*argv.add(i)) }?.to_string());
        }
        let (code, doc) = mcycle::cli::run(args);
        exit = code;
        unsafe { put(out, into_c_string(doc)) }
    });
    if status == MC_OK {
        exit
    } else {
        status
    }
}
