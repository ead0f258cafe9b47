use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use gatecomm_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { gc_string_free(s) };
    out
}

fn last_error() -> String {
    let p = gc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(src: &str) -> *mut GcExpr {
    let c = CString::new(src).unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { gc_expr_parse(c.as_ptr(), &mut e) }, GcStatus::Ok);
    e
}

#[test]
fn expression_round_trip() {
    unsafe {
        let a = parse("2[q->qq]");
        let b = parse("[q->q] + [qq]");
        let mut eq = false;
        assert_eq!(gc_expr_equal(a, b, &mut eq), GcStatus::Ok);
        assert!(eq);

        let mut x = ptr::null_mut();
        assert_eq!(gc_expr_exchange(a, &mut x), GcStatus::Ok);
        let mut xx = ptr::null_mut();
        assert_eq!(gc_expr_exchange(x, &mut xx), GcStatus::Ok);
        assert_eq!(gc_expr_equal(a, xx, &mut eq), GcStatus::Ok);
        assert!(eq);

        let mut canon = ptr::null_mut();
        assert_eq!(gc_expr_canonicalize(a, &mut canon), GcStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(gc_expr_to_string(canon, &mut s), GcStatus::Ok);
        let text = take(s);
        let again = parse(&text);
        assert_eq!(gc_expr_equal(again, b, &mut eq), GcStatus::Ok);
        assert!(eq, "{text}");

        for h in [a, b, x, xx, canon, again] {
            gc_expr_free(h);
        }
        gc_expr_free(ptr::null_mut());
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let src = CString::new("2[q->").unwrap();
        let mut e = ptr::null_mut();
        assert_eq!(gc_expr_parse(src.as_ptr(), &mut e), GcStatus::Parse);
        assert!(e.is_null());
        assert!(last_error().contains("parse error"));

        let c = parse("[c->c]");
        let mut r = ptr::null_mut();
        assert_eq!(gc_expr_reverse(c, &mut r), GcStatus::ReverseUndefined);
        gc_expr_free(c);

        assert_eq!(gc_expr_parse(ptr::null(), &mut e), GcStatus::NullArgument);
        let ok = CString::new("[qq]").unwrap();
        assert_eq!(gc_expr_parse(ok.as_ptr(), ptr::null_mut()), GcStatus::NullArgument);

        let bad = [0xffu8, 0];
        assert_eq!(gc_expr_parse(bad.as_ptr().cast(), &mut e), GcStatus::InvalidUtf8);

        let e2 = parse("[qq]");
        assert!(gc_last_error().is_null());
        gc_expr_free(e2);
    }
}

#[test]
fn state_handle_applies_gates() {
    let json = r#"{"wires":[{"id":"A","party":"Alice","dim":2},{"id":"B","party":"Bob","dim":2}],
                   "amplitudes":[[0,0],[0,0],[1,0],[0,0]]}"#;
    unsafe {
        let c = CString::new(json).unwrap();
        let mut s = ptr::null_mut();
        let st = gc_state_from_json(c.as_ptr(), &mut s);
        assert_eq!(st, GcStatus::Ok, "{}", if st == GcStatus::Ok { String::new() } else { last_error() });
        let mut d = 0usize;
        assert_eq!(gc_state_dim(s, &mut d), GcStatus::Ok);
        assert_eq!(d, 4);

        let gate = CString::new("v_m:1").unwrap();
        let names = [CString::new("A").unwrap(), CString::new("B").unwrap()];
        let ptrs: Vec<_> = names.iter().map(|n| n.as_ptr()).collect();
        assert_eq!(gc_state_apply_gate(s, gate.as_ptr(), ptrs.as_ptr(), 2), GcStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        let total: f64 = (0..4)
            .map(|i| {
                assert_eq!(gc_state_amplitude(s, i, &mut re, &mut im), GcStatus::Ok);
                re * re + im * im
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(gc_state_amplitude(s, 4, &mut re, &mut im), GcStatus::Domain);

        let bad_wire = [CString::new("Z").unwrap()];
        let bp: Vec<_> = bad_wire.iter().map(|n| n.as_ptr()).collect();
        let h = CString::new("hadamard").unwrap();
        assert_ne!(gc_state_apply_gate(s, h.as_ptr(), bp.as_ptr(), 1), GcStatus::Ok);

        let mut out = ptr::null_mut();
        assert_eq!(gc_state_to_json(s, &mut out), GcStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["amplitudes"].as_array().unwrap().len(), 4);
        gc_state_free(s);
    }
}

#[test]
fn region_and_concentration() {
    unsafe {
        let mut r = GcTriple { c1: 0.0, c2: 0.0, e: 0.0 };
        let t = GcTriple { c1: 1.5, c2: -0.25, e: 2.0 };
        assert_eq!(gc_region_reverse(t, &mut r), GcStatus::Ok);
        let mut back = r;
        assert_eq!(gc_region_reverse(r, &mut back), GcStatus::Ok);
        assert_eq!(back, t);

        let p = [0.6, 0.4];
        let mut out = ptr::null_mut();
        assert_eq!(gc_concentrate(p.as_ptr(), 2, 20, 0.3, &mut out), GcStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["n"], 20);
        assert_eq!(gc_concentrate(p.as_ptr(), 2, 20, -1.0, &mut out), GcStatus::Domain);
    }
}

#[test]
fn experiments_run_through_the_abi() {
    unsafe {
        let name = CString::new("backcomm").unwrap();
        let params = CString::new(r#"{"m": 2, "seed": 1}"#).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(gc_run_experiment(name.as_ptr(), params.as_ptr(), &mut out), GcStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert!(v.is_object());

        let missing = CString::new("nope").unwrap();
        assert_ne!(gc_run_experiment(missing.as_ptr(), ptr::null(), &mut out), GcStatus::Ok);
        assert!(last_error().contains("nope"));

        let bad = CString::new("[1,2]").unwrap();
        assert_eq!(gc_run_experiment(name.as_ptr(), bad.as_ptr(), &mut out), GcStatus::Json);
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/gatecomm.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["gc_expr_parse", "gc_run_experiment", "gc_last_error", "GC_STATUS_OK", "typedef struct gc_expr gc_expr"] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
    let Ok(status) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99"]).arg(&header).status() else {
        eprintln!("no C compiler on PATH; skipping syntax check");
        return;
    };
    assert!(status.success());
}

#[test]
fn c_program_links_against_the_library() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // the test binary lives in <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    if !lib_dir.join("libgatecomm_ffi.so").exists() {
        eprintln!("shared library not found in {}; skipping", lib_dir.display());
        return;
    }
    let out = std::env::temp_dir().join(format!("gatecomm-smoke-{}", std::process::id()));
    let Ok(status) = std::process::Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .args(["-lgatecomm_ffi", "-o"])
        .arg(&out)
        .status()
    else {
        eprintln!("no C compiler on PATH; skipping");
        return;
    };
    assert!(status.success());
    let run = std::process::Command::new(&out).env("LD_LIBRARY_PATH", &lib_dir).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert_eq!(run.status.code(), Some(0));
    let text = String::from_utf8(run.stdout).unwrap();
    assert_eq!(text.trim(), "[qq] + 2[q<-qq]");
}
