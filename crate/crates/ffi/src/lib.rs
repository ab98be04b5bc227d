//! C interface to the `bcsi` toolkit.
//!
//! Objects are opaque handles created by `*_from_json` or computing
//! functions and released with the matching `*_free`. Every fallible
//! function returns a [`BcsiStatus`]; on failure the message is available
//! from [`bcsi_last_error_message`] on the same thread. Strings returned
//! through `char **` belong to the caller and go back through
//! [`bcsi_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bcsi::classifier::classify_all;
use bcsi::io;
use bcsi::polytope::{regions_equal, RateRegion};
use bcsi::probability::{AuxScheme, Channel};
use bcsi::rate_regions::{
    augment_with_totals, mi_constants, project_raw_to_theorem1, raw_achievability_system, theorem1_region,
};
use bcsi::simulator::{split_rates, SchemeConfig, Simulator};
use bcsi::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcsiStatus {
    Ok = 0,
    Malformed = 1,
    Guard = 2,
    Internal = 3,
    InvalidArgument = 4,
    AlphabetMismatch = 5,
    NullPointer = 6,
}

/// A broadcast channel `p(y1, y2 | x)`.
pub struct BcsiChannel(Channel);

/// An auxiliary scheme `p(u0, u1, u2)` with its map to the input.
pub struct BcsiScheme(AuxScheme);

/// A rate region over `R1..R5`.
pub struct BcsiRegion(RateRegion);

/// The five mutual informations of a scheme, in bits.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BcsiMiConstants {
    /// `I(U0, U1; Y1)`
    pub i_u0u1_y1: f64,
    /// `I(U0, U2; Y2)`
    pub i_u0u2_y2: f64,
    /// `I(U1; Y1 | U0)`
    pub i_u1_y1_given_u0: f64,
    /// `I(U2; Y2 | U0)`
    pub i_u2_y2_given_u0: f64,
    /// `I(U1; U2 | U0)`
    pub i_u1_u2_given_u0: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BcsiStatus {
    match e {
        Error::Malformed(_) => BcsiStatus::Malformed,
        Error::Guard(_) => BcsiStatus::Guard,
        Error::Internal(_) => BcsiStatus::Internal,
        Error::AlphabetMismatch(_) => BcsiStatus::AlphabetMismatch,
        _ => BcsiStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BcsiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BcsiStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            BcsiStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            BcsiStatus::Internal
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::Lib(Error::Malformed(format!("{what} is not UTF-8"))))
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    let c = CString::new(s).map_err(|_| Fail::Lib(Error::Internal("output contains NUL".into())))?;
    *out = c.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bcsi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bcsi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a channel file's JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcsi_channel_from_json(json: *const c_char, out: *mut *mut BcsiChannel) -> BcsiStatus {
    guard(|| {
        let ch = io::channel_from_json(text(json, "json")?)?;
        put(out, BcsiChannel(ch), "out")
    })
}

/// # Safety
/// `ch` must come from [`bcsi_channel_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn bcsi_channel_free(ch: *mut BcsiChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Parses a scheme file's JSON text against the channel's input size.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcsi_scheme_from_json(
    json: *const c_char,
    ch: *const BcsiChannel,
    out: *mut *mut BcsiScheme,
) -> BcsiStatus {
    guard(|| {
        let ch = get(ch, "channel")?;
        let s = io::scheme_from_json(text(json, "json")?, ch.0.x_size())?;
        put(out, BcsiScheme(s), "out")
    })
}

/// # Safety
/// `s` must come from [`bcsi_scheme_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn bcsi_scheme_free(s: *mut BcsiScheme) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcsi_mi_constants(
    scheme: *const BcsiScheme,
    ch: *const BcsiChannel,
    out: *mut BcsiMiConstants,
) -> BcsiStatus {
    guard(|| {
        let c = mi_constants(&get(scheme, "scheme")?.0, &get(ch, "channel")?.0)?;
        let [a, b, c1, d, e] = c.bits();
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        *out = BcsiMiConstants {
            i_u0u1_y1: a,
            i_u0u2_y2: b,
            i_u1_y1_given_u0: c1,
            i_u2_y2_given_u0: d,
            i_u1_u2_given_u0: e,
        };
        Ok(())
    })
}

/// The five inner-bound inequalities at one scheme.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcsi_theorem1_region(
    scheme: *const BcsiScheme,
    ch: *const BcsiChannel,
    out: *mut *mut BcsiRegion,
) -> BcsiStatus {
    guard(|| {
        let r = theorem1_region(&get(scheme, "scheme")?.0, &get(ch, "channel")?.0)?;
        put(out, BcsiRegion(r), "out")
    })
}

/// The raw coding conditions projected onto `R1..R5` by elimination.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcsi_raw_projection(
    scheme: *const BcsiScheme,
    ch: *const BcsiChannel,
    out: *mut *mut BcsiRegion,
) -> BcsiStatus {
    guard(|| {
        let consts = mi_constants(&get(scheme, "scheme")?.0, &get(ch, "channel")?.0)?;
        let r = project_raw_to_theorem1(&augment_with_totals(raw_achievability_system(&consts)?)?)?;
        put(out, BcsiRegion(r), "out")
    })
}

/// Parses a region file's JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcsi_region_from_json(json: *const c_char, out: *mut *mut BcsiRegion) -> BcsiStatus {
    guard(|| {
        let r = io::region_from_json(text(json, "json")?)?;
        put(out, BcsiRegion(r), "out")
    })
}

/// Region as JSON text; free with [`bcsi_string_free`].
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcsi_region_to_json(region: *const BcsiRegion, out: *mut *mut c_char) -> BcsiStatus {
    guard(|| {
        let s = io::to_canonical_json(&io::region_to_value(&get(region, "region")?.0))?;
        put_string(out, s)
    })
}

/// # Safety
/// `r` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn bcsi_region_free(r: *mut BcsiRegion) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Whether `rates[0..5]` lies in the region, nonnegativity included.
///
/// # Safety
/// `rates` must point to five doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcsi_region_contains(
    region: *const BcsiRegion,
    rates: *const f64,
    out: *mut bool,
) -> BcsiStatus {
    guard(|| {
        let r = get(region, "region")?;
        if rates.is_null() {
            return Err(Fail::Null("rates"));
        }
        let point = std::slice::from_raw_parts(rates, 5);
        *out.as_mut().ok_or(Fail::Null("out"))? = r.0.contains(point);
        Ok(())
    })
}

/// Mutual containment inside the default rate box.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcsi_regions_equal(a: *const BcsiRegion, b: *const BcsiRegion, out: *mut bool) -> BcsiStatus {
    guard(|| {
        let eq = regions_equal(&get(a, "a")?.0, &get(b, "b")?.0, &RateRegion::default_box())?;
        *out.as_mut().ok_or(Fail::Null("out"))? = eq;
        Ok(())
    })
}

/// All four class verdicts as a JSON array.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcsi_classify_json(ch: *const BcsiChannel, out: *mut *mut c_char) -> BcsiStatus {
    guard(|| {
        let v = classify_all(&get(ch, "channel")?.0)?;
        put_string(out, io::to_canonical_json(&v)?)
    })
}

/// Runs the coding simulation. `config_json` holds `rates` (five
/// numbers), `n`, `trials`, and optionally `seed` (default 0) and `eps`
/// (default 0.3). The report is written as JSON.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcsi_simulate_json(
    ch: *const BcsiChannel,
    scheme: *const BcsiScheme,
    config_json: *const c_char,
    out: *mut *mut c_char,
) -> BcsiStatus {
    guard(|| {
        let ch = &get(ch, "channel")?.0;
        let scheme = &get(scheme, "scheme")?.0;
        let cfg: serde_json::Value = serde_json::from_str(text(config_json, "config_json")?)
            .map_err(|e| Error::Malformed(format!("invalid config JSON: {e}")))?;
        let bad = |what: &str| Fail::Lib(Error::Malformed(format!("config needs {what}")));
        let rates: Vec<f64> = cfg["rates"]
            .as_array()
            .and_then(|a| a.iter().map(|v| v.as_f64()).collect::<Option<Vec<_>>>())
            .filter(|v| v.len() == 5)
            .ok_or_else(|| bad("\"rates\" with five numbers"))?;
        let n = cfg["n"].as_u64().ok_or_else(|| bad("a positive \"n\""))? as usize;
        let trials = cfg["trials"].as_u64().ok_or_else(|| bad("\"trials\""))? as usize;
        let seed = cfg.get("seed").map_or(Some(0), |v| v.as_u64()).ok_or_else(|| bad("an integer \"seed\""))?;
        let eps = cfg.get("eps").map_or(Some(0.3), |v| v.as_f64()).ok_or_else(|| bad("a numeric \"eps\""))?;
        let consts = mi_constants(scheme, ch)?;
        let split = split_rates(&consts, [rates[0], rates[1], rates[2], rates[3], rates[4]], None)?;
        let sim = Simulator::new(ch, SchemeConfig::new(scheme.clone(), n, split, eps, seed))?;
        let report = sim.estimate_error(trials, None)?;
        put_string(out, io::to_canonical_json(&report)?)
    })
}

/// Library version string; static, do not free.
#[no_mangle]
pub extern "C" fn bcsi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
