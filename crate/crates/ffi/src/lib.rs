//! C ABI over `mevforge`.
//!
//! Every fallible function returns an [`MfStatus`] code. On failure the message is kept per
//! thread and can be fetched with [`mf_last_error_message`]. Strings returned through out
//! pointers are owned by the caller and released with [`mf_string_free`]; handles are released
//! with their own `_free` function. Big integers cross the boundary as decimal strings.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::fmt::Display;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mevforge::amm::{swap_v2, PoolState};
use mevforge::analytics::{mann_kendall, market_share, report, TrendDirection};
use mevforge::cli::{extract_transactions, RecordWriter, RunConfig};
use mevforge::model::{bsc_builders, parse_trace_file, Address, TokenId, Transaction};
use mevforge::sim::{contestable_window, missing_horizon, run_campaign, write_summary, Campaign, Ms, Protocol, Scenario};
use num_bigint::BigUint;
use num_rational::BigRational;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Internal = 5,
}

/// Opaque set of parsed transactions.
pub struct MfTraceSet {
    txs: Vec<Transaction>,
    skipped_events: usize,
}

/// Opaque finished simulation campaign.
pub struct MfCampaign {
    inner: Campaign,
}

/// Mann-Kendall result. `direction` is -1 (decreasing), 0 (no trend) or 1 (increasing).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MfTrend {
    pub n: u64,
    pub s: i64,
    pub variance: f64,
    pub z: f64,
    pub tau: f64,
    pub p_value: f64,
    pub direction: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Display) {
    let c = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: MfStatus, msg: impl Display) -> MfStatus {
    set_error(msg);
    status
}

/// Runs `f`, clearing the last error first and turning panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), (MfStatus, String)>) -> MfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MfStatus::Ok,
        Ok(Err((s, m))) => fail(s, m),
        Err(_) => fail(MfStatus::Internal, "panic inside mevforge"),
    }
}

type Res<T> = Result<T, (MfStatus, String)>;

fn err<T>(s: MfStatus, m: impl Display) -> Res<T> {
    Err((s, m.to_string()))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Res<&'a str> {
    if p.is_null() {
        return err(MfStatus::NullArgument, format!("{name} is null"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (MfStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, v: T, name: &str) -> Res<()> {
    if out.is_null() {
        return err(MfStatus::NullArgument, format!("{name} is null"));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Res<()> {
    let c = CString::new(s).map_err(|_| (MfStatus::Internal, "output contains NUL".to_string()))?;
    put(out, c.into_raw(), "out")
}

fn uint(s: &str, name: &str) -> Res<BigUint> {
    s.trim().parse().map_err(|_| (MfStatus::Parse, format!("{name}: not an unsigned integer: {s:?}")))
}

/// Message for the last failed call on this thread, or null. Valid until the next call into
/// this library on the same thread; do not free.
#[no_mangle]
pub extern "C" fn mf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn mf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Output of an exact-input constant-product swap selling into `reserve_in`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_swap_v2(
    reserve_in: *const c_char,
    reserve_out: *const c_char,
    amount_in: *const c_char,
    fee_ppm: u32,
    out: *mut *mut c_char,
) -> MfStatus {
    guard(|| {
        let r_in = uint(text(reserve_in, "reserve_in")?, "reserve_in")?;
        let r_out = uint(text(reserve_out, "reserve_out")?, "reserve_out")?;
        let a = uint(text(amount_in, "amount_in")?, "amount_in")?;
        let t0 = TokenId::new("IN", Address::from_low_u64(1), 18).expect("static");
        let t1 = TokenId::new("OUT", Address::from_low_u64(2), 18).expect("static");
        let pool = PoolState::v2(Address::from_low_u64(3), t0.clone(), t1, fee_ppm, r_in, r_out);
        pool.validate().map_err(|e| (MfStatus::InvalidInput, e.to_string()))?;
        let (o, _) = swap_v2(&pool, &t0, &a).map_err(|e| (MfStatus::InvalidInput, e.to_string()))?;
        put_string(out, o.to_string())
    })
}

/// Contestable window in whole milliseconds. `protocol` is 0 for direct BSC delivery and 1 for
/// an Ethereum relay.
///
/// # Safety
/// `out_ms` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_contestable_window(protocol: i32, horizon_ms: i64, delay_ms: i64, out_ms: *mut i64) -> MfStatus {
    guard(|| {
        let p = match protocol {
            0 => Protocol::BscDirect,
            1 => Protocol::EthRelay,
            other => return err(MfStatus::InvalidInput, format!("unknown protocol {other}")),
        };
        let w = contestable_window(p, Ms::from_integer(horizon_ms), Ms::from_integer(delay_ms));
        put(out_ms, w.to_integer(), "out_ms")
    })
}

/// `eth_ms − bsc_ms`; fails when the BSC horizon is not shorter.
///
/// # Safety
/// `out_ms` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_missing_horizon(eth_ms: i64, bsc_ms: i64, out_ms: *mut i64) -> MfStatus {
    guard(|| {
        let h = missing_horizon(Ms::from_integer(eth_ms), Ms::from_integer(bsc_ms))
            .map_err(|e| (MfStatus::InvalidInput, e.to_string()))?;
        put(out_ms, h.to_integer(), "out_ms")
    })
}

/// Market-share table as CSV for `n` brands with their block counts.
///
/// # Safety
/// `brands` and `counts` must each point to `n` valid elements.
#[no_mangle]
pub unsafe extern "C" fn mf_market_share_csv(
    brands: *const *const c_char,
    counts: *const u64,
    n: usize,
    out_csv: *mut *mut c_char,
) -> MfStatus {
    guard(|| {
        if n > 0 && (brands.is_null() || counts.is_null()) {
            return err(MfStatus::NullArgument, "brands or counts is null");
        }
        let mut map = BTreeMap::new();
        for i in 0..n {
            *map.entry(text(*brands.add(i), "brand")?.to_string()).or_insert(0u64) += *counts.add(i);
        }
        let table = market_share(&map).map_err(|e| (MfStatus::InvalidInput, e.to_string()))?;
        let mut buf = Vec::new();
        report::write_shares(&table, &mut buf).map_err(|e| (MfStatus::Internal, e.to_string()))?;
        put_string(out_csv, String::from_utf8(buf).expect("csv is UTF-8"))
    })
}

/// Mann-Kendall trend test over `n` finite values.
///
/// # Safety
/// `values` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_mann_kendall(values: *const f64, n: usize, alpha: f64, out: *mut MfTrend) -> MfStatus {
    guard(|| {
        if values.is_null() && n > 0 {
            return err(MfStatus::NullArgument, "values is null");
        }
        let series = (0..n)
            .map(|i| {
                let v = *values.add(i);
                BigRational::from_float(v).ok_or_else(|| (MfStatus::InvalidInput, format!("value {i} is not finite")))
            })
            .collect::<Res<Vec<_>>>()?;
        let r = mann_kendall(&series, alpha).map_err(|e| (MfStatus::InvalidInput, e.to_string()))?;
        let f = |x: &BigRational| mevforge::num::rational_to_f64(x);
        let direction = match r.direction {
            TrendDirection::Decreasing => -1,
            TrendDirection::NoTrend => 0,
            TrendDirection::Increasing => 1,
        };
        put(
            out,
            MfTrend {
                n: r.n as u64,
                s: r.s_statistic,
                variance: f(&r.variance),
                z: r.z_score,
                tau: f(&r.tau),
                p_value: r.p_value,
                direction,
            },
            "out",
        )
    })
}

/// Parses NDJSON traces, stopping at the first malformed line.
///
/// # Safety
/// `ndjson` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mf_traces_parse(ndjson: *const c_char, out: *mut *mut MfTraceSet) -> MfStatus {
    guard(|| {
        let t = text(ndjson, "ndjson")?;
        let parsed = parse_trace_file(t.as_bytes()).map_err(|e| (MfStatus::Parse, e.to_string()))?;
        let set = Box::new(MfTraceSet { txs: parsed.transactions, skipped_events: parsed.skipped_events });
        put(out, Box::into_raw(set), "out")
    })
}

/// Number of transactions in the set; 0 for null.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_traces_len(set: *const MfTraceSet) -> usize {
    set.as_ref().map_or(0, |s| s.txs.len())
}

/// Events dropped during parsing because their kind was not recognised.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_traces_skipped_events(set: *const MfTraceSet) -> usize {
    set.as_ref().map_or(0, |s| s.skipped_events)
}

/// Extracts arbitrage records as a record-file CSV. `config_toml` may be null for defaults.
/// Builders are labelled from the bundled BSC list. The first failing transaction aborts the
/// call with `InvalidInput`.
///
/// # Safety
/// `set` must be a live handle; `config_toml` null or NUL-terminated; `out_csv` writable.
#[no_mangle]
pub unsafe extern "C" fn mf_traces_extract_csv(
    set: *const MfTraceSet,
    config_toml: *const c_char,
    out_csv: *mut *mut c_char,
) -> MfStatus {
    guard(|| {
        let set = set.as_ref().ok_or((MfStatus::NullArgument, "set is null".to_string()))?;
        let config = if config_toml.is_null() {
            RunConfig::default()
        } else {
            RunConfig::from_toml(text(config_toml, "config_toml")?).map_err(|e| (MfStatus::Parse, e.to_string()))?
        };
        let mut buf = Vec::new();
        let mut w = RecordWriter::new(&mut buf).map_err(|e| (MfStatus::Internal, e.to_string()))?;
        for r in extract_transactions(&set.txs, &config, &bsc_builders()) {
            match r {
                Ok(Some(rec)) => w.write(&rec).map_err(|e| (MfStatus::Internal, e.to_string()))?,
                Ok(None) => {}
                Err(m) => return err(MfStatus::InvalidInput, m),
            }
        }
        w.finish().map_err(|e| (MfStatus::Internal, e.to_string()))?;
        put_string(out_csv, String::from_utf8(buf).expect("csv is UTF-8"))
    })
}

/// # Safety
/// `set` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_traces_free(set: *mut MfTraceSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Runs a campaign. `scenario` is a bundled name (`bsc_duopoly`, `eth_duopoly`) or a path.
///
/// # Safety
/// `scenario` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mf_campaign_run(scenario: *const c_char, slots: u64, seed: u64, out: *mut *mut MfCampaign) -> MfStatus {
    guard(|| {
        let s = Scenario::resolve(text(scenario, "scenario")?).map_err(|e| (MfStatus::InvalidInput, e.to_string()))?;
        let c = run_campaign(&s, slots, seed).map_err(|e| (MfStatus::InvalidInput, e.to_string()))?;
        put(out, Box::into_raw(Box::new(MfCampaign { inner: c })), "out")
    })
}

/// Slots won by `builder_id`.
///
/// # Safety
/// `campaign` must be a live handle; `builder_id` NUL-terminated; `out_wins` writable.
#[no_mangle]
pub unsafe extern "C" fn mf_campaign_wins(campaign: *const MfCampaign, builder_id: *const c_char, out_wins: *mut u64) -> MfStatus {
    guard(|| {
        let c = campaign.as_ref().ok_or((MfStatus::NullArgument, "campaign is null".to_string()))?;
        let id = text(builder_id, "builder_id")?;
        let row = c.inner.summary.rows.iter().find(|r| r.builder_id == id);
        let row = row.ok_or_else(|| (MfStatus::InvalidInput, format!("no builder {id:?}")))?;
        put(out_wins, row.wins, "out_wins")
    })
}

/// Slots that fell back to a locally built block.
///
/// # Safety
/// `campaign` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_campaign_fallback_slots(campaign: *const MfCampaign) -> u64 {
    campaign.as_ref().map_or(0, |c| c.inner.summary.fallback_slots)
}

/// Campaign summary CSV.
///
/// # Safety
/// `campaign` must be a live handle; `out_csv` writable.
#[no_mangle]
pub unsafe extern "C" fn mf_campaign_summary_csv(campaign: *const MfCampaign, out_csv: *mut *mut c_char) -> MfStatus {
    guard(|| {
        let c = campaign.as_ref().ok_or((MfStatus::NullArgument, "campaign is null".to_string()))?;
        let mut buf = Vec::new();
        write_summary(&c.inner.summary, &mut buf).map_err(|e| (MfStatus::Internal, e.to_string()))?;
        put_string(out_csv, String::from_utf8(buf).expect("csv is UTF-8"))
    })
}

/// # Safety
/// `campaign` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_campaign_free(campaign: *mut MfCampaign) {
    if !campaign.is_null() {
        drop(Box::from_raw(campaign));
    }
}
