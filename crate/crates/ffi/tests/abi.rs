use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use ideals_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Takes ownership of a library string.
fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { ideals_string_free(p) };
    s
}

fn last_error() -> String {
    let p = ideals_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

const SQUARES: &str = r#"{"pieces": [
    {"support": {"kind": "squares"}, "term": {"const": "1"}},
    {"support": {"kind": "not", "of": {"kind": "squares"}}, "term": {"const": "0"}}]}"#;

#[test]
fn sets() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(ideals_set_from_json(c(r#"{"kind": "evens"}"#).as_ptr(), &mut s), IdealsStatus::Ok);
        let mut b = false;
        assert_eq!(ideals_set_contains(s, 10, &mut b), IdealsStatus::Ok);
        assert!(b);
        let mut n = 0;
        assert_eq!(ideals_set_count(s, 101, &mut n), IdealsStatus::Ok);
        assert_eq!(n, 50);
        let mut out = ptr::null_mut();
        assert_eq!(ideals_set_density(s, c("polya").as_ptr(), 0, &mut out), IdealsStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["value"], "1/2");
        assert_eq!(ideals_set_member(s, c("z").as_ptr(), &mut b), IdealsStatus::Ok);
        assert!(!b);
        assert_eq!(ideals_set_member(s, c("nonsense").as_ptr(), &mut b), IdealsStatus::Schema);
        assert!(last_error().contains("nonsense"));
        assert_eq!(ideals_set_density(s, c("bogus").as_ptr(), 0, &mut out), IdealsStatus::Schema);
        ideals_set_free(s);
    }
}

#[test]
fn bad_input() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(ideals_set_from_json(c("{").as_ptr(), &mut s), IdealsStatus::Schema);
        assert_eq!(ideals_set_from_json(c(r#"{"kind": "moon"}"#).as_ptr(), &mut s), IdealsStatus::Schema);
        assert_eq!(ideals_set_from_json(ptr::null(), &mut s), IdealsStatus::NullArgument);
        assert_eq!(ideals_set_from_json(c(r#"{"kind": "evens"}"#).as_ptr(), ptr::null_mut()), IdealsStatus::NullArgument);
        let bad = [0xffu8, 0];
        assert_eq!(ideals_set_from_json(bad.as_ptr().cast(), &mut s), IdealsStatus::InvalidUtf8);
        let mut b = false;
        assert_eq!(ideals_set_contains(ptr::null(), 1, &mut b), IdealsStatus::NullArgument);
        ideals_set_free(ptr::null_mut());
        ideals_string_free(ptr::null_mut());
    }
}

#[test]
fn sequences() {
    unsafe {
        let mut x = ptr::null_mut();
        assert_eq!(ideals_seq_from_json(c(SQUARES).as_ptr(), &mut x), IdealsStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(ideals_seq_eval(x, 9, &mut out), IdealsStatus::Ok);
        assert_eq!(take(out), "1");
        assert_eq!(ideals_seq_limit(x, c("z").as_ptr(), &mut out), IdealsStatus::Ok);
        assert_eq!(take(out), "0");
        assert_eq!(ideals_seq_limit(x, c("fin").as_ptr(), &mut out), IdealsStatus::NotConvergent);
        assert_eq!(ideals_seq_cluster(x, c("fin").as_ptr(), &mut out), IdealsStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["gamma"], serde_json::json!(["0", "1"]));
        assert_eq!(ideals_seq_decompose(x, c("z").as_ptr(), &mut out), IdealsStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        let y = ideals::sequences::SymSeq::from_json(&v["y"]).unwrap();
        let z = ideals::sequences::SymSeq::from_json(&v["z"]).unwrap();
        let orig = ideals::sequences::SymSeq::from_json(&serde_json::from_str(SQUARES).unwrap()).unwrap();
        assert_eq!(orig.first_sum_mismatch(&y, &z, 1000).unwrap(), None);
        assert_eq!(ideals_seq_decompose(x, c("fin").as_ptr(), &mut out), IdealsStatus::NotConvergent);
        ideals_seq_free(x);
    }
}

#[test]
fn checks() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(ideals_check(c("T1.i").as_ptr(), 30, 5, &mut out), IdealsStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["pass"], true);
        assert_eq!(ideals_check(c("NC.L3.vi").as_ptr(), 500, 5, &mut out), IdealsStatus::CheckFailed);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert!(v["counterexample"].is_object());
        assert_eq!(ideals_check(c("nope").as_ptr(), 0, 5, &mut out), IdealsStatus::Schema);
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

/// Compiles a C client against the generated header and the static library.
#[test]
fn c_client() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libideals_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let exe = std::env::temp_dir().join(format!("ideals_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to compile");
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "{\"exact\":true,\"value\":\"1/2\"}\n0\n");
}
