//! C ABI over `eikonal-core`. All objects are opaque handles; every call
//! returns an `EkStatus` and records a message readable with
//! `ek_last_error`. Strings handed out must be released with
//! `ek_string_free`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use eikonal_core::classify::classify;
use eikonal_core::expr::{Poly, Session, Verdict};
use eikonal_core::jet::{check_rhs, is_symmetry};
use eikonal_core::syntax::{parse_declarations, parse_poly, parse_vector_field};
use eikonal_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EkStatus {
    EkOk = 0,
    EkErrNull = 1,
    EkErrUtf8 = 2,
    EkErrSyntax = 3,
    EkErrUndeclared = 4,
    EkErrConstraint = 5,
    EkErrInconclusive = 6,
    EkErrDomain = 7,
    EkErrInternal = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EkVerdict {
    EkZero = 0,
    EkNonzero = 1,
    EkUnknown = 2,
}

/// Declarations plus the last error message.
pub struct EkSession {
    session: Session,
    last_error: CString,
}

/// A parsed right-hand side bound to the session it was parsed in.
pub struct EkExpr {
    poly: Poly,
}

fn status_of(e: &Error) -> EkStatus {
    match e {
        Error::Syntax { .. } => EkStatus::EkErrSyntax,
        Error::UndeclaredSymbol(_) => EkStatus::EkErrUndeclared,
        Error::ConstraintViolation(_) | Error::IllegalDependence(_) | Error::UnsupportedDimension(_) => {
            EkStatus::EkErrConstraint
        }
        Error::Inconclusive(_) | Error::NormalizationUnavailable(_) => EkStatus::EkErrInconclusive,
        Error::Domain(_) => EkStatus::EkErrDomain,
        _ => EkStatus::EkErrInternal,
    }
}

fn set_error(s: &mut EkSession, msg: &str) {
    s.last_error = CString::new(msg.replace('\0', " ")).unwrap_or_default();
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, EkStatus> {
    if p.is_null() {
        return Err(EkStatus::EkErrNull);
    }
    CStr::from_ptr(p).to_str().map_err(|_| EkStatus::EkErrUtf8)
}

fn hand_out(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Runs `body` against a live session, converting errors and panics into
/// status codes and recording the message.
unsafe fn guarded(s: *mut EkSession, body: impl FnOnce(&mut EkSession) -> Result<(), (EkStatus, String)>) -> EkStatus {
    let Some(sess) = s.as_mut() else {
        return EkStatus::EkErrNull;
    };
    match catch_unwind(AssertUnwindSafe(|| body(sess))) {
        Ok(Ok(())) => {
            set_error(sess, "");
            EkStatus::EkOk
        }
        Ok(Err((code, msg))) => {
            set_error(sess, &msg);
            code
        }
        Err(_) => {
            set_error(sess, "internal panic");
            EkStatus::EkErrInternal
        }
    }
}

fn core_err(e: Error) -> (EkStatus, String) {
    (status_of(&e), e.to_string())
}

fn arg_err(code: EkStatus, what: &str) -> (EkStatus, String) {
    let msg = match code {
        EkStatus::EkErrNull => format!("{what} is null"),
        _ => format!("{what} is not valid UTF-8"),
    };
    (code, msg)
}

#[no_mangle]
pub extern "C" fn ek_session_new() -> *mut EkSession {
    Box::into_raw(Box::new(EkSession {
        session: Session::new(),
        last_error: CString::default(),
    }))
}

/// # Safety
/// `s` must come from `ek_session_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ek_session_free(s: *mut EkSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Applies declaration lines such as `opaque h(ut)` or `param m positive`.
///
/// # Safety
/// `s` must be a live session and `text` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ek_declare(s: *mut EkSession, text: *const c_char) -> EkStatus {
    guarded(s, |sess| {
        let text = read_str(text).map_err(|c| arg_err(c, "text"))?;
        parse_declarations(text, &mut sess.session).map_err(core_err)
    })
}

/// Parses a right-hand side; on success `*out` holds a handle to release
/// with `ek_expr_free`.
///
/// # Safety
/// `s` must be a live session, `text` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ek_parse(s: *mut EkSession, text: *const c_char, out: *mut *mut EkExpr) -> EkStatus {
    guarded(s, |sess| {
        if out.is_null() {
            return Err(arg_err(EkStatus::EkErrNull, "out"));
        }
        *out = ptr::null_mut();
        let text = read_str(text).map_err(|c| arg_err(c, "text"))?;
        let poly = parse_poly(text, &sess.session).map_err(core_err)?;
        *out = Box::into_raw(Box::new(EkExpr { poly }));
        Ok(())
    })
}

/// # Safety
/// `e` must come from `ek_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ek_expr_free(e: *mut EkExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Canonical text of an expression, or null for a null handle.
///
/// # Safety
/// `e` must be a live expression handle.
#[no_mangle]
pub unsafe extern "C" fn ek_print(e: *const EkExpr) -> *mut c_char {
    match e.as_ref() {
        Some(e) => hand_out(e.poly.to_string()),
        None => ptr::null_mut(),
    }
}

/// Classifies a right-hand side; `*json_out` receives the classification
/// as JSON.
///
/// # Safety
/// `s` must be a live session, `e` a live expression and `json_out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ek_classify(s: *mut EkSession, e: *const EkExpr, json_out: *mut *mut c_char) -> EkStatus {
    guarded(s, |_| {
        if json_out.is_null() {
            return Err(arg_err(EkStatus::EkErrNull, "json_out"));
        }
        *json_out = ptr::null_mut();
        let e = e.as_ref().ok_or_else(|| arg_err(EkStatus::EkErrNull, "expression"))?;
        let c = classify(&e.poly).map_err(core_err)?;
        *json_out = hand_out(c.to_json().to_string());
        Ok(())
    })
}

/// Decides whether the operator `field` (surface syntax, `n` spatial
/// variables) is a symmetry of `u_a u_a = F`.
///
/// # Safety
/// `s` must be a live session, `field` a NUL-terminated string, `rhs` a
/// live expression and `verdict` writable.
#[no_mangle]
pub unsafe extern "C" fn ek_verify_symmetry(
    s: *mut EkSession,
    field: *const c_char,
    rhs: *const EkExpr,
    n: u32,
    verdict: *mut EkVerdict,
) -> EkStatus {
    guarded(s, |sess| {
        if verdict.is_null() {
            return Err(arg_err(EkStatus::EkErrNull, "verdict"));
        }
        let field = read_str(field).map_err(|c| arg_err(c, "field"))?;
        let f = rhs.as_ref().ok_or_else(|| arg_err(EkStatus::EkErrNull, "rhs"))?;
        let n = n as usize;
        let q = parse_vector_field(field, n, &sess.session).map_err(core_err)?;
        check_rhs(&f.poly).map_err(core_err)?;
        *verdict = match is_symmetry(&q, &f.poly, n).map_err(core_err)? {
            Verdict::Zero => EkVerdict::EkZero,
            Verdict::NonZero(_) => EkVerdict::EkNonzero,
            Verdict::Unknown => EkVerdict::EkUnknown,
        };
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ek_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}

/// Message of the last failed call on `s`; empty after a success. The
/// pointer stays valid until the next call on the same session.
///
/// # Safety
/// `s` must be a live session or null.
#[no_mangle]
pub unsafe extern "C" fn ek_last_error(s: *const EkSession) -> *const c_char {
    match s.as_ref() {
        Some(s) => s.last_error.as_ptr(),
        None => c"null session".as_ptr(),
    }
}
