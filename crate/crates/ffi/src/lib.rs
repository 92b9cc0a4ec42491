//! C ABI over the TREND toolkit.
//!
//! Schemas are opaque handles. Every fallible call returns a
//! [`TrendStatus`]; on failure a message is available from
//! [`trend_last_error_message`] on the same thread. Strings returned through
//! `out` parameters are owned by the caller and released with
//! [`trend_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use trend::model::Schema;
use trend::reason::{self, Answer, Bounds, ReasonError};
use trend::semantics::{self, SemanticsOptions, TemporalState};
use trend::text::{self, KeywordStyle};
use trend::{dlr, render, verbal};

/// Version of this interface; bumped on incompatible changes.
pub const TREND_ABI_VERSION: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidState = 4,
    NotFound = 5,
    InvalidArgument = 6,
    Panic = 7,
}

/// Keyword family used for transition labels.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendKeywordStyle {
    ChgExt = 0,
    DevDex = 1,
}

/// Search limits for the reasoning calls; every field must be at least 1.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrendBounds {
    pub max_objects: u32,
    pub max_horizon: u32,
    pub max_values: u32,
}

/// Opaque schema handle.
pub struct TrendSchema {
    schema: Schema,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(TrendStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn fail<T>(status: TrendStatus, msg: impl Into<String>) -> FfiResult<T> {
    Err(Failure(status, msg.into()))
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> TrendStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TrendStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TrendStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(TrendStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(TrendStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn schema_ref<'a>(p: *const TrendSchema) -> FfiResult<&'a Schema> {
    match p.as_ref() {
        Some(h) => Ok(&h.schema),
        None => fail(TrendStatus::NullPointer, "schema handle is null"),
    }
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    if out.is_null() {
        return fail(TrendStatus::NullPointer, "output pointer is null");
    }
    let c = CString::new(s).or_else(|_| fail(TrendStatus::InvalidArgument, "output contains a NUL byte"))?;
    *out = c.into_raw();
    Ok(())
}

fn style(s: u32) -> FfiResult<KeywordStyle> {
    match s {
        0 => Ok(KeywordStyle::ChgExt),
        1 => Ok(KeywordStyle::DevDex),
        _ => fail(TrendStatus::InvalidArgument, format!("unknown keyword style {s}")),
    }
}

unsafe fn bounds(p: *const TrendBounds) -> FfiResult<Bounds> {
    let Some(b) = p.as_ref() else { return Ok(Bounds::default()) };
    if b.max_objects == 0 || b.max_horizon == 0 || b.max_values == 0 {
        return fail(TrendStatus::InvalidArgument, "bounds must be at least 1");
    }
    Ok(Bounds {
        max_objects: b.max_objects as usize,
        max_horizon: b.max_horizon,
        max_values: b.max_values as usize,
    })
}

fn reason_failure(e: ReasonError) -> Failure {
    let status = match e {
        ReasonError::UnknownElement(_) => TrendStatus::NotFound,
        ReasonError::Unverified(_) => TrendStatus::Panic,
        _ => TrendStatus::InvalidArgument,
    };
    Failure(status, e.to_string())
}

unsafe fn answer(a: Answer, holds: *mut bool, out_json: *mut *mut c_char) -> FfiResult<()> {
    if holds.is_null() {
        return fail(TrendStatus::NullPointer, "holds pointer is null");
    }
    if !out_json.is_null() {
        write_string(out_json, a.to_json().to_string())?;
    }
    *holds = a.holds;
    Ok(())
}

#[no_mangle]
pub extern "C" fn trend_abi_version() -> u32 {
    TREND_ABI_VERSION
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn trend_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn trend_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates schema text. On `PARSE_ERROR` the message lists
/// every diagnostic, one per line.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trend_schema_parse(src: *const c_char, out: *mut *mut TrendSchema) -> TrendStatus {
    guard(|| {
        if out.is_null() {
            return fail(TrendStatus::NullPointer, "output pointer is null");
        }
        let src = read_str(src, "source")?;
        match text::parse_schema(src) {
            Ok(schema) => {
                *out = Box::into_raw(Box::new(TrendSchema { schema }));
                Ok(())
            }
            Err(diags) => {
                let lines: Vec<String> = diags
                    .iter()
                    .map(|d| match d.span {
                        Some(s) => format!("{s}: {}: {}", d.rule, d.message),
                        None => format!("{}: {}", d.rule, d.message),
                    })
                    .collect();
                fail(TrendStatus::ParseError, lines.join("\n"))
            }
        }
    })
}

/// # Safety
/// `schema` must be null or a handle from [`trend_schema_parse`], not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn trend_schema_free(schema: *mut TrendSchema) {
    if !schema.is_null() {
        drop(Box::from_raw(schema));
    }
}

/// Canonical text of the schema.
///
/// # Safety
/// `schema` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trend_schema_format(
    schema: *const TrendSchema,
    keyword_style: u32,
    out: *mut *mut c_char,
) -> TrendStatus {
    guard(|| {
        let s = schema_ref(schema)?;
        write_string(out, text::serialize_with(s, style(keyword_style)?))
    })
}

/// DLR_US axioms, one per line.
///
/// # Safety
/// `schema` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trend_schema_to_dlr(
    schema: *const TrendSchema,
    out: *mut *mut c_char,
) -> TrendStatus {
    guard(|| write_string(out, dlr::translate(schema_ref(schema)?).to_string()))
}

/// Controlled-English sentences, one per line.
///
/// # Safety
/// `schema` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trend_schema_verbalize(
    schema: *const TrendSchema,
    keyword_style: u32,
    out: *mut *mut c_char,
) -> TrendStatus {
    guard(|| {
        let lines = verbal::verbalize(schema_ref(schema)?, style(keyword_style)?);
        let mut text = lines.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        write_string(out, text)
    })
}

/// DOT diagram.
///
/// # Safety
/// `schema` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trend_schema_to_dot(
    schema: *const TrendSchema,
    keyword_style: u32,
    ascii: bool,
    out: *mut *mut c_char,
) -> TrendStatus {
    guard(|| {
        let opts = render::RenderOptions { labels: style(keyword_style)?, ascii };
        write_string(out, render::to_dot(schema_ref(schema)?, &opts))
    })
}

/// Checks a JSON state. `violation_count` receives the number of violations;
/// `out_json`, if not null, receives them as a JSON array.
///
/// # Safety
/// `schema` must be a live handle, `state_json` a NUL-terminated string and
/// `violation_count` writable.
#[no_mangle]
pub unsafe extern "C" fn trend_state_check(
    schema: *const TrendSchema,
    state_json: *const c_char,
    violation_count: *mut usize,
    out_json: *mut *mut c_char,
) -> TrendStatus {
    guard(|| {
        let s = schema_ref(schema)?;
        let json = read_str(state_json, "state")?;
        if violation_count.is_null() {
            return fail(TrendStatus::NullPointer, "violation_count is null");
        }
        let st =
            TemporalState::from_json(json).or_else(|e| fail(TrendStatus::InvalidState, e.to_string()))?;
        let v = semantics::check_state(s, &st).or_else(|e| fail(TrendStatus::InvalidState, e.to_string()))?;
        if !out_json.is_null() {
            write_string(out_json, serde_json::to_string(&v).expect("violations serialize"))?;
        }
        *violation_count = v.len();
        Ok(())
    })
}

/// Whether `element` is populated in some legal state within `bounds` (null
/// for the defaults). `out_json`, if not null, receives the verdict with
/// the witness.
///
/// # Safety
/// `schema` must be a live handle, `element` a NUL-terminated string,
/// `bounds` null or readable, `holds` writable.
#[no_mangle]
pub unsafe extern "C" fn trend_sat(
    schema: *const TrendSchema,
    element: *const c_char,
    bounds: *const TrendBounds,
    holds: *mut bool,
    out_json: *mut *mut c_char,
) -> TrendStatus {
    guard(|| {
        let s = schema_ref(schema)?;
        let e = read_str(element, "element")?;
        let a = reason::satisfiable(s, e, self::bounds(bounds)?, &SemanticsOptions::default())
            .map_err(reason_failure)?;
        answer(a, holds, out_json)
    })
}

/// Whether `sub` is contained in `sup` in every legal state within bounds.
///
/// # Safety
/// As for [`trend_sat`].
#[no_mangle]
pub unsafe extern "C" fn trend_subsume(
    schema: *const TrendSchema,
    sub: *const c_char,
    sup: *const c_char,
    bounds: *const TrendBounds,
    holds: *mut bool,
    out_json: *mut *mut c_char,
) -> TrendStatus {
    guard(|| {
        let s = schema_ref(schema)?;
        let (a, b) = (read_str(sub, "sub")?, read_str(sup, "sup")?);
        let r = reason::subsumes(s, a, b, self::bounds(bounds)?, &SemanticsOptions::default())
            .map_err(reason_failure)?;
        answer(r, holds, out_json)
    })
}

/// Whether every legal state within bounds satisfies one more statement.
///
/// # Safety
/// As for [`trend_sat`].
#[no_mangle]
pub unsafe extern "C" fn trend_implies(
    schema: *const TrendSchema,
    constraint: *const c_char,
    bounds: *const TrendBounds,
    holds: *mut bool,
    out_json: *mut *mut c_char,
) -> TrendStatus {
    guard(|| {
        let s = schema_ref(schema)?;
        let text = read_str(constraint, "constraint")?;
        let decl = text::parse_statement(text).map_err(|d| {
            let msgs: Vec<String> = d.iter().map(|x| x.message.clone()).collect();
            Failure(TrendStatus::ParseError, msgs.join("\n"))
        })?;
        let r = reason::implies(s, &decl, self::bounds(bounds)?, &SemanticsOptions::default())
            .map_err(reason_failure)?;
        answer(r, holds, out_json)
    })
}
