use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::process::Command;
use std::ptr;

use mevforge::arb::fixtures::worked_trace;
use mevforge::model::write_trace_file;
use mevforge_ffi::*;

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    mf_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = mf_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn swap_v2_matches_formula() {
    unsafe {
        let (a, b, c) = (CString::new("1000000").unwrap(), CString::new("2000000").unwrap(), CString::new("1000").unwrap());
        let mut out = ptr::null_mut();
        assert_eq!(mf_swap_v2(a.as_ptr(), b.as_ptr(), c.as_ptr(), 3000, &mut out), MfStatus::Ok);
        // ⌊1000·997000·2e6 / (1e6·1e6 + 1000·997000)⌋
        assert_eq!(take(out), "1992");
        assert!(mf_last_error_message().is_null());

        let bad = CString::new("12x").unwrap();
        assert_eq!(mf_swap_v2(bad.as_ptr(), b.as_ptr(), c.as_ptr(), 3000, &mut out), MfStatus::Parse);
        assert!(last_error().contains("reserve_in"));
        assert_eq!(mf_swap_v2(ptr::null(), b.as_ptr(), c.as_ptr(), 3000, &mut out), MfStatus::NullArgument);
    }
}

#[test]
fn horizons() {
    unsafe {
        let mut v = -1;
        assert_eq!(mf_contestable_window(0, 3000, 0, &mut v), MfStatus::Ok);
        assert_eq!(v, 0);
        assert_eq!(mf_contestable_window(1, 12_000, 0, &mut v), MfStatus::Ok);
        assert_eq!(v, 12_000);
        assert_eq!(mf_missing_horizon(12_000, 3000, &mut v), MfStatus::Ok);
        assert_eq!(v, 9000);
        assert_eq!(mf_missing_horizon(3000, 12_000, &mut v), MfStatus::InvalidInput);
        assert_eq!(mf_contestable_window(7, 1, 0, &mut v), MfStatus::InvalidInput);
    }
}

#[test]
fn shares_and_trend() {
    unsafe {
        let names: Vec<CString> = ["48Club", "Blockrazor"].iter().map(|s| CString::new(*s).unwrap()).collect();
        let ptrs: Vec<*const c_char> = names.iter().map(|c| c.as_ptr()).collect();
        let counts = [3u64, 1];
        let mut out = ptr::null_mut();
        assert_eq!(mf_market_share_csv(ptrs.as_ptr(), counts.as_ptr(), 2, &mut out), MfStatus::Ok);
        let csv = take(out);
        assert!(csv.contains("48Club,3,0,75.00,75.00"), "{csv}");

        let mut t = MfTrend::default();
        let up: Vec<f64> = (0..10).map(f64::from).collect();
        assert_eq!(mf_mann_kendall(up.as_ptr(), up.len(), 0.05, &mut t), MfStatus::Ok);
        assert_eq!((t.s, t.direction), (45, 1));
        assert_eq!(mf_mann_kendall(up.as_ptr(), 2, 0.05, &mut t), MfStatus::InvalidInput);
    }
}

#[test]
fn trace_handle_extracts_worked_example() {
    let mut buf = Vec::new();
    write_trace_file(&mut buf, &[worked_trace()]).unwrap();
    let text = CString::new(buf).unwrap();
    unsafe {
        let mut set = ptr::null_mut();
        assert_eq!(mf_traces_parse(text.as_ptr(), &mut set), MfStatus::Ok);
        assert_eq!(mf_traces_len(set), 1);
        let mut out = ptr::null_mut();
        assert_eq!(mf_traces_extract_csv(set, ptr::null(), &mut out), MfStatus::Ok);
        let csv = take(out);
        let row = csv.lines().nth(2).unwrap();
        assert!(row.contains(",3040,820,0,2220,"), "{row}");
        mf_traces_free(set);

        let junk = CString::new("{not json").unwrap();
        assert_eq!(mf_traces_parse(junk.as_ptr(), &mut set), MfStatus::Parse);
        assert!(last_error().contains("line 1"));
    }
}

#[test]
fn campaign_handle() {
    let name = CString::new("bsc_duopoly").unwrap();
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(mf_campaign_run(name.as_ptr(), 200, 42, &mut c), MfStatus::Ok);
        let (mut a, mut b) = (0u64, 0u64);
        let (alpha, beta) = (CString::new("alpha").unwrap(), CString::new("beta").unwrap());
        assert_eq!(mf_campaign_wins(c, alpha.as_ptr(), &mut a), MfStatus::Ok);
        assert_eq!(mf_campaign_wins(c, beta.as_ptr(), &mut b), MfStatus::Ok);
        assert_eq!(a + b + mf_campaign_fallback_slots(c), 200);
        let mut out = ptr::null_mut();
        assert_eq!(mf_campaign_summary_csv(c, &mut out), MfStatus::Ok);
        assert!(take(out).starts_with("builder_id,wins"));
        let nobody = CString::new("gamma").unwrap();
        assert_eq!(mf_campaign_wins(c, nobody.as_ptr(), &mut a), MfStatus::InvalidInput);
        mf_campaign_free(c);
        mf_campaign_free(ptr::null_mut());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(mf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// The generated header must compile as C.
#[test]
fn header_compiles() {
    let dir = tempfile_dir();
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        "#include \"mevforge.h\"\nint main(void) { MfTrend t = {0}; char *s = 0; \
         return mf_swap_v2(\"1\", \"1\", \"1\", 0, &s) == MF_STATUS_OK && t.n == 0; }\n",
    )
    .unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let status = Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", include]).arg(&src).status();
    match status {
        Ok(s) => assert!(s.success(), "cc rejected the header"),
        Err(e) => panic!("no C compiler available: {e}"),
    }
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("mevforge-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
