//! C ABI over the ideals engine.
//!
//! Sets and sequences are opaque handles built from the same JSON the CLI
//! reads. Every call returns an [`IdealsStatus`]; on failure the message is
//! available from [`ideals_last_error`] on the calling thread. Strings handed
//! out by the library are freed with [`ideals_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ideals::density::{self, OracleConfig};
use ideals::ideals::{member, IdealDesc, IdealError};
use ideals::natset::{exact_json, NatSet, SetError};
use ideals::rational::format_q;
use ideals::sequences::{cluster_points, decompose, ideal_lim, limit_points, SeqError, SymSeq};
use ideals::theorems::{self, CheckError};
use serde_json::{json, Value};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdealsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Schema = 3,
    Undecidable = 4,
    NotConvergent = 5,
    Precondition = 6,
    CheckFailed = 7,
    Panic = 8,
}

/// Opaque set handle.
pub struct IdealsSet(NatSet);

/// Opaque sequence handle.
pub struct IdealsSequence(SymSeq);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(IdealsStatus, String);

impl From<SetError> for Failure {
    fn from(e: SetError) -> Self {
        let status = match e {
            SetError::Schema(_) | SetError::Invalid(_) => IdealsStatus::Schema,
            SetError::FiniteSetExhausted { .. } => IdealsStatus::Precondition,
            SetError::Unsupported(_) | SetError::Overflow => IdealsStatus::Undecidable,
        };
        Failure(status, e.to_string())
    }
}

impl From<IdealError> for Failure {
    fn from(e: IdealError) -> Self {
        let status = match e {
            IdealError::UnknownIdeal(_) => IdealsStatus::Schema,
            IdealError::Undecidable(_) | IdealError::UnsupportedFamily(_) => IdealsStatus::Undecidable,
            _ => IdealsStatus::Precondition,
        };
        Failure(status, e.to_string())
    }
}

impl From<SeqError> for Failure {
    fn from(e: SeqError) -> Self {
        let status = match &e {
            SeqError::Set(s) => return s.clone().into(),
            SeqError::Ideal(i) => return i.clone().into(),
            SeqError::Schema(_) | SeqError::Invalid(_) => IdealsStatus::Schema,
            SeqError::Undecidable(_) | SeqError::Unsupported(_) => IdealsStatus::Undecidable,
            SeqError::NotConvergent(_) => IdealsStatus::NotConvergent,
            SeqError::HypothesisViolated(_) | SeqError::Precondition(_) => IdealsStatus::Precondition,
        };
        Failure(status, e.to_string())
    }
}

impl From<density::DensityError> for Failure {
    fn from(e: density::DensityError) -> Self {
        Failure(IdealsStatus::Schema, e.to_string())
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        Failure(IdealsStatus::Schema, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, records any failure or panic, and returns its status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IdealsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IdealsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            IdealsStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(IdealsStatus::NullArgument, "null pointer argument".into())
}

/// # Safety
/// `p` is null or a nul-terminated string.
unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(IdealsStatus::InvalidUtf8, e.to_string()))
}

fn parse_json(s: &str) -> Result<Value, Failure> {
    serde_json::from_str(s).map_err(|e| Failure(IdealsStatus::Schema, e.to_string()))
}

fn ideal(name: &str) -> Result<IdealDesc, Failure> {
    Ok(name.parse::<IdealDesc>()?)
}

/// # Safety
/// `out` is null or writable.
unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

/// # Safety
/// `out` is null or writable.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(IdealsStatus::Schema, e.to_string()))?;
    put(out, c.into_raw())
}

/// # Safety
/// `p` is null or a live handle from this library.
unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

/// The message behind the last failing call on this thread, or null. Valid
/// until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ideals_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is null or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ideals_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a set from JSON (`{"kind": ...}`).
///
/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ideals_set_from_json(json: *const c_char, out: *mut *mut IdealsSet) -> IdealsStatus {
    guard(|| {
        let v = parse_json(text(json)?)?;
        let s = NatSet::from_json(v.get("set").unwrap_or(&v))?;
        put(out, Box::into_raw(Box::new(IdealsSet(s))))
    })
}

/// # Safety
/// `s` is null or a handle from [`ideals_set_from_json`], freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ideals_set_free(s: *mut IdealsSet) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` is a live set handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ideals_set_contains(s: *const IdealsSet, n: u64, out: *mut bool) -> IdealsStatus {
    guard(|| put(out, borrow(s)?.0.contains(n)))
}

/// `|S ∩ [1, n]|`.
///
/// # Safety
/// `s` is a live set handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ideals_set_count(s: *const IdealsSet, n: u64, out: *mut u64) -> IdealsStatus {
    guard(|| put(out, borrow(s)?.0.count(n)))
}

/// Density report as JSON: `{"value", "exact": true}` or `{"lo", "hi", "exact": false, "window"}`.
/// `functional` is one of `d*`, `d_*`, `log`, `alpha:<q>`, `polya`; a zero
/// budget selects the default.
///
/// # Safety
/// `s` is a live set handle; `functional` a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ideals_set_density(
    s: *const IdealsSet,
    functional: *const c_char,
    budget: u64,
    out: *mut *mut c_char,
) -> IdealsStatus {
    guard(|| {
        let cfg = if budget == 0 { OracleConfig::default() } else { OracleConfig::with_budget(budget) };
        cfg.validate()?;
        let r = density::by_name(&borrow(s)?.0, text(functional)?, &cfg)?;
        put_string(out, r.to_json().to_string())
    })
}

/// # Safety
/// `s` is a live set handle; `ideal_name` a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ideals_set_member(s: *const IdealsSet, ideal_name: *const c_char, out: *mut bool) -> IdealsStatus {
    guard(|| {
        let m = member(&ideal(text(ideal_name)?)?, &borrow(s)?.0, &OracleConfig::default())?;
        put(out, m)
    })
}

/// Parses a sequence from JSON (`{"pieces": [...]}`).
///
/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ideals_seq_from_json(json: *const c_char, out: *mut *mut IdealsSequence) -> IdealsStatus {
    guard(|| {
        let v = parse_json(text(json)?)?;
        let x = SymSeq::from_json(v.get("sequence").unwrap_or(&v))?;
        put(out, Box::into_raw(Box::new(IdealsSequence(x))))
    })
}

/// # Safety
/// `x` is null or a handle from [`ideals_seq_from_json`], freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ideals_seq_free(x: *mut IdealsSequence) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// `x_n` as a `"p/q"` string.
///
/// # Safety
/// `x` is a live sequence handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ideals_seq_eval(x: *const IdealsSequence, n: u64, out: *mut *mut c_char) -> IdealsStatus {
    guard(|| put_string(out, format_q(&borrow(x)?.0.eval(n)?)))
}

/// The ideal limit as a `"p/q"` string; `NotConvergent` when there is none.
///
/// # Safety
/// `x` is a live sequence handle; `ideal_name` a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ideals_seq_limit(
    x: *const IdealsSequence,
    ideal_name: *const c_char,
    out: *mut *mut c_char,
) -> IdealsStatus {
    guard(|| {
        let i = ideal(text(ideal_name)?)?;
        let rep = ideal_lim(&borrow(x)?.0, &i)?;
        match rep.limit {
            Some(l) => put_string(out, format_q(&l)),
            None => Err(Failure(IdealsStatus::NotConvergent, rep.reason.unwrap_or_else(|| "no limit".into()))),
        }
    })
}

/// `{"gamma": [...], "lambda": [...], "divergent": null | {"support", "inIdeal"}}`.
///
/// # Safety
/// `x` is a live sequence handle; `ideal_name` a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ideals_seq_cluster(
    x: *const IdealsSequence,
    ideal_name: *const c_char,
    out: *mut *mut c_char,
) -> IdealsStatus {
    guard(|| {
        let i = ideal(text(ideal_name)?)?;
        let x = &borrow(x)?.0;
        let g = cluster_points(x, &i)?;
        let l = limit_points(x, &i)?;
        let v = json!({
            "gamma": g.points.iter().map(format_q).collect::<Vec<_>>(),
            "lambda": l.points.iter().map(format_q).collect::<Vec<_>>(),
            "divergent": g.divergent.map(|d| json!({"support": exact_json(&d.support), "inIdeal": d.in_ideal})),
        });
        put_string(out, v.to_string())
    })
}

/// `x = y + z` against the ideal limit: `{"limit", "y", "z", "zSupport"}`.
///
/// # Safety
/// `x` is a live sequence handle; `ideal_name` a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ideals_seq_decompose(
    x: *const IdealsSequence,
    ideal_name: *const c_char,
    out: *mut *mut c_char,
) -> IdealsStatus {
    guard(|| {
        let i = ideal(text(ideal_name)?)?;
        let x = &borrow(x)?.0;
        let l = ideal_lim(x, &i)?
            .limit
            .ok_or_else(|| Failure(IdealsStatus::NotConvergent, format!("no {}-limit", i.name())))?;
        let d = decompose(x, &i, &l)?;
        let v = json!({
            "limit": format_q(&l),
            "y": d.y.to_json(),
            "z": d.z.to_json(),
            "zSupport": exact_json(&d.z_support),
        });
        put_string(out, v.to_string())
    })
}

/// Runs one catalog check or negative control. `trials == 0` selects the
/// default. The verdict JSON is written to `out` whether or not it passes;
/// a failing check returns `CheckFailed`.
///
/// # Safety
/// `id` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ideals_check(id: *const c_char, trials: u64, seed: u64, out: *mut *mut c_char) -> IdealsStatus {
    guard(|| {
        let v = theorems::check(text(id)?, (trials > 0).then_some(trials), seed)?;
        put_string(out, v.to_json().to_string())?;
        if v.pass {
            Ok(())
        } else {
            let why = v.counterexample.map_or_else(String::new, |c| c.explanation);
            Err(Failure(IdealsStatus::CheckFailed, format!("{} failed: {why}", v.id)))
        }
    })
}
