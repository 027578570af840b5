use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use folim_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

#[test]
fn stone_pairing_roundtrip() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(folim_graph_hn(2, &mut g), FolimStatus::Ok);
        let mut n = 0;
        assert_eq!(folim_graph_order(g, &mut n), FolimStatus::Ok);
        assert_eq!(n, 10);

        let mut f = ptr::null_mut();
        let src = cstr("exists x2. adj(x1,x2)");
        assert_eq!(folim_formula_parse(src.as_ptr(), &mut f), FolimStatus::Ok);
        let (mut num, mut den) = (0, 0);
        assert_eq!(folim_stone_exact(g, f, &mut num, &mut den), FolimStatus::Ok);
        assert_eq!((num, den), (4, 5));

        let (mut est, mut rad) = (0.0, 0.0);
        assert_eq!(folim_stone_mc(g, f, 4000, 7, &mut est, &mut rad), FolimStatus::Ok);
        assert!((est - 0.8).abs() <= rad);

        let mut text = ptr::null_mut();
        assert_eq!(folim_formula_to_string(f, &mut text), FolimStatus::Ok);
        assert_eq!(CStr::from_ptr(text).to_str().unwrap(), "exists x2. adj(x1,x2)");
        folim_string_free(text);

        folim_formula_free(f);
        folim_graph_free(g);
    }
}

#[test]
fn parse_errors_set_message() {
    unsafe {
        let mut f = ptr::null_mut();
        let src = cstr("exists x1 adj(");
        assert_eq!(folim_formula_parse(src.as_ptr(), &mut f), FolimStatus::Parse);
        assert!(f.is_null());
        let msg = CStr::from_ptr(folim_last_error()).to_str().unwrap();
        assert!(msg.contains("syntax"), "{msg}");

        let mut g = ptr::null_mut();
        let bad = cstr("3 1\n0 7\n");
        assert_eq!(folim_graph_parse(bad.as_ptr(), &mut g), FolimStatus::Graph);
    }
}

#[test]
fn graph_json_and_edge_list() {
    unsafe {
        let mut g = ptr::null_mut();
        let src = cstr("3 2\n0 1\n1 2\n");
        assert_eq!(folim_graph_parse(src.as_ptr(), &mut g), FolimStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(folim_graph_to_json(g, &mut json), FolimStatus::Ok);
        let v = CStr::from_ptr(json).to_str().unwrap();
        assert!(v.contains("\"n\":3"), "{v}");
        folim_string_free(json);
        folim_graph_free(g);
    }
}

#[test]
fn solve_and_strategy() {
    unsafe {
        let (mut k1, mut k2) = (ptr::null_mut(), ptr::null_mut());
        let (s1, s2) = (cstr("1 0\n"), cstr("2 1\n0 1\n"));
        assert_eq!(folim_graph_parse(s1.as_ptr(), &mut k1), FolimStatus::Ok);
        assert_eq!(folim_graph_parse(s2.as_ptr(), &mut k2), FolimStatus::Ok);
        let mut w = FolimWinner::Duplicator;
        assert_eq!(folim_ef_solve(k1, k2, 2, &mut w), FolimStatus::Ok);
        assert_eq!(w, FolimWinner::Spoiler);
        assert_eq!(folim_ef_solve(k1, k2, 1, &mut w), FolimStatus::Ok);
        assert_eq!(w, FolimWinner::Duplicator);
        folim_graph_free(k1);
        folim_graph_free(k2);

        let (mut h4, mut h5) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(folim_graph_hn(4, &mut h4), FolimStatus::Ok);
        assert_eq!(folim_graph_hn(5, &mut h5), FolimStatus::Ok);
        assert_eq!(folim_ef_solve(h4, h5, 2, &mut w), FolimStatus::CapExceeded);

        let mut s = ptr::null_mut();
        assert_eq!(folim_strategy_new(h4, h5, 2, &mut s), FolimStatus::Ok);
        let mut budget = 0;
        assert_eq!(folim_strategy_budget(s, &mut budget), FolimStatus::Ok);
        assert_eq!(budget, 2);
        let mut r = 0;
        assert_eq!(folim_strategy_respond(s, FolimSide::Left, 0, &mut r), FolimStatus::Ok);
        assert_eq!(folim_strategy_respond(s, FolimSide::Right, 10_000, &mut r), FolimStatus::InvalidArgument);
        assert_eq!(folim_strategy_respond(s, FolimSide::Right, 0, &mut r), FolimStatus::Ok);
        assert_eq!(folim_strategy_respond(s, FolimSide::Left, 1, &mut r), FolimStatus::Strategy);
        folim_strategy_free(s);

        let mut h2 = ptr::null_mut();
        assert_eq!(folim_graph_hn(2, &mut h2), FolimStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(folim_strategy_new(h2, h5, 3, &mut s), FolimStatus::Precondition);
        assert!(s.is_null());
        folim_graph_free(h2);
        folim_graph_free(h4);
        folim_graph_free(h5);
    }
}

#[test]
fn header_declares_every_export() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/folim.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build.rs");
    for name in [
        "folim_last_error",
        "folim_version",
        "folim_string_free",
        "folim_graph_hn",
        "folim_graph_parse",
        "folim_graph_order",
        "folim_graph_to_json",
        "folim_graph_free",
        "folim_formula_parse",
        "folim_formula_to_string",
        "folim_formula_free",
        "folim_stone_exact",
        "folim_stone_mc",
        "folim_ef_solve",
        "folim_strategy_new",
        "folim_strategy_respond",
        "folim_strategy_budget",
        "folim_strategy_free",
        "typedef struct FolimGraph FolimGraph",
        "FOLIM_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

/// Compiles and runs a C client against the static library when a C
/// compiler and the archive are available.
#[test]
fn c_client_links_against_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"));
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let lib = target.join(profile).join("libfolim_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or {} not built", lib.display());
        return;
    }
    let dir = std::env::temp_dir().join(format!("folim-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("client.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "folim.h"
int main(void) {
    FolimGraph *g = NULL;
    FolimFormula *f = NULL;
    uint64_t num = 0, den = 0;
    if (folim_graph_hn(2, &g) != FOLIM_STATUS_OK) return 1;
    if (folim_formula_parse("exists x2. adj(x1,x2)", &f) != FOLIM_STATUS_OK) return 2;
    if (folim_stone_exact(g, f, &num, &den) != FOLIM_STATUS_OK) return 3;
    printf("%llu/%llu\n", (unsigned long long)num, (unsigned long long)den);
    folim_formula_free(f);
    folim_graph_free(g);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.join("client");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to compile");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4/5");
}
