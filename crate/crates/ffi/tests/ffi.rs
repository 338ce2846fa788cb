use std::ffi::{CStr, CString};
use std::ptr;

use eikonal_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn last_error(s: *const EkSession) -> String {
    CStr::from_ptr(ek_last_error(s)).to_str().unwrap().to_string()
}

#[test]
fn parse_print_classify() {
    unsafe {
        let s = ek_session_new();
        assert_eq!(ek_declare(s, c("opaque h(ut)\nparam m positive").as_ptr()), EkStatus::EkOk);
        let mut e = ptr::null_mut();
        assert_eq!(ek_parse(s, c("ut^2 - 1").as_ptr(), &mut e), EkStatus::EkOk);
        let text = ek_print(e);
        assert_eq!(CStr::from_ptr(text).to_str().unwrap(), "ut^2 - 1");
        ek_string_free(text);
        let mut json = ptr::null_mut();
        assert_eq!(ek_classify(s, e, &mut json), EkStatus::EkOk);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["case"], 8);
        ek_string_free(json);
        ek_expr_free(e);
        ek_session_free(s);
    }
}

#[test]
fn symmetry_verdicts() {
    unsafe {
        let s = ek_session_new();
        ek_declare(s, c("opaque h(ut)").as_ptr());
        let mut e = ptr::null_mut();
        assert_eq!(ek_parse(s, c("h(ut)").as_ptr(), &mut e), EkStatus::EkOk);
        let mut v = EkVerdict::EkUnknown;
        assert_eq!(ek_verify_symmetry(s, c("@t").as_ptr(), e, 2, &mut v), EkStatus::EkOk);
        assert_eq!(v, EkVerdict::EkZero);
        assert_eq!(ek_verify_symmetry(s, c("t*@t").as_ptr(), e, 2, &mut v), EkStatus::EkOk);
        assert_eq!(v, EkVerdict::EkNonzero);
        assert_eq!(ek_verify_symmetry(s, c("@t").as_ptr(), e, 1, &mut v), EkStatus::EkErrConstraint);
        ek_expr_free(e);
        ek_session_free(s);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let s = ek_session_new();
        let mut e = ptr::null_mut();
        assert_eq!(ek_parse(s, c("ut^2 +").as_ptr(), &mut e), EkStatus::EkErrSyntax);
        assert!(e.is_null());
        assert!(last_error(s).contains("1:7"), "{}", last_error(s));
        assert_eq!(ek_parse(s, c("g(ut)").as_ptr(), &mut e), EkStatus::EkErrUndeclared);
        assert_eq!(ek_parse(s, ptr::null(), &mut e), EkStatus::EkErrNull);
        assert_eq!(ek_parse(ptr::null_mut(), c("ut").as_ptr(), &mut e), EkStatus::EkErrNull);
        let bad = [0xffu8, 0];
        assert_eq!(ek_declare(s, bad.as_ptr().cast()), EkStatus::EkErrUtf8);
        assert_eq!(ek_parse(s, c("ut").as_ptr(), &mut e), EkStatus::EkOk);
        assert_eq!(last_error(s), "");
        let mut json = ptr::null_mut();
        assert_eq!(ek_classify(s, ptr::null(), &mut json), EkStatus::EkErrNull);
        ek_expr_free(e);
        assert!(ek_print(ptr::null()).is_null());
        assert_eq!(last_error(ptr::null()), "null session");
        ek_session_free(s);
        ek_session_free(ptr::null_mut());
        ek_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/eikonal.h")).unwrap();
    for name in [
        "ek_session_new",
        "ek_session_free",
        "ek_declare",
        "ek_parse",
        "ek_expr_free",
        "ek_print",
        "ek_classify",
        "ek_verify_symmetry",
        "ek_string_free",
        "ek_last_error",
        "EK_ERR_SYNTAX",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let out = std::process::Command::new(cc)
        .args(["-fsyntax-only", "-x", "c", "-I", dir, "-"])
        .stdin(std::process::Stdio::piped())
        .spawn()
        .and_then(|mut child| {
            use std::io::Write;
            child.stdin.take().unwrap().write_all(b"#include \"eikonal.h\"\nint main(void) { return EK_OK; }\n")?;
            child.wait()
        })
        .unwrap();
    assert!(out.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
