//! C ABI for the story reader.
//!
//! An engine handle holds the domain and search settings. Interpreting a
//! story returns the JSON report as a string owned by the library, to be
//! released with `sr_string_free`. On failure the message is available from
//! `sr_last_error` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use storyreader::qa::answer;
use storyreader::reader::{interpret, Config};
use storyreader::report::{build_report, to_json};
use storyreader::story::{load_story, Sources};

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Domain, narrative or frame-rule text failed to load.
    ParseError = 3,
    /// A question does not refer to the domain.
    QuestionError = 4,
    /// The story has no consistent interpretation; the report is still
    /// produced and carries the diagnostic.
    NoModel = 5,
    Panic = 6,
}

/// Opaque engine handle.
pub struct SrEngine {
    domain: Option<String>,
    frame_rules: Option<String>,
    strict_frames: bool,
    config: Config,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

unsafe fn opt_str(p: *const c_char) -> Result<Option<String>, SrStatus> {
    if p.is_null() {
        return Ok(None);
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(Some(s.to_string())),
        Err(_) => {
            set_error("argument is not valid UTF-8");
            Err(SrStatus::InvalidUtf8)
        }
    }
}

fn guard(f: impl FnOnce() -> SrStatus) -> SrStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            SrStatus::Panic
        }
    }
}

/// Creates an engine. `domain_text` may be null to use the bundled
/// restaurant domain; it is validated here.
///
/// # Safety
/// `domain_text` must be null or a nul-terminated string; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_new(domain_text: *const c_char, out: *mut *mut SrEngine) -> SrStatus {
    guard(|| {
        if out.is_null() {
            set_error("`out` is null");
            return SrStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let domain = match opt_str(domain_text) {
            Ok(d) => d,
            Err(s) => return s,
        };
        if let Some(text) = &domain {
            if let Err(e) = storyreader::action_core::load_domain(text) {
                set_error(format!("domain: {e}"));
                return SrStatus::ParseError;
            }
        }
        let engine = SrEngine { domain, frame_rules: None, strict_frames: false, config: Config::default() };
        *out = Box::into_raw(Box::new(engine));
        SrStatus::Ok
    })
}

/// Releases an engine. Null is ignored.
///
/// # Safety
/// `engine` must come from `sr_engine_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_free(engine: *mut SrEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Sets search limits. `max_models` of 0 means unlimited; `parallelism`
/// of 0 uses all cores.
///
/// # Safety
/// `engine` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_configure(
    engine: *mut SrEngine,
    horizon: usize,
    max_models: usize,
    max_abductions: usize,
    parallelism: usize,
) -> SrStatus {
    guard(|| {
        let Some(e) = engine.as_mut() else {
            set_error("`engine` is null");
            return SrStatus::NullArgument;
        };
        e.config = Config {
            horizon,
            max_models: (max_models > 0).then_some(max_models),
            max_abductions,
            parallelism,
        };
        SrStatus::Ok
    })
}

/// Sets frame mapping rules (null restores the bundled rules) and strict
/// frame handling.
///
/// # Safety
/// `engine` must be a live handle; `rules_text` null or nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_set_frame_rules(
    engine: *mut SrEngine,
    rules_text: *const c_char,
    strict: bool,
) -> SrStatus {
    guard(|| {
        let Some(e) = engine.as_mut() else {
            set_error("`engine` is null");
            return SrStatus::NullArgument;
        };
        match opt_str(rules_text) {
            Ok(r) => {
                e.frame_rules = r;
                e.strict_frames = strict;
                SrStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Interprets a narrative and writes its JSON report to `out_json`.
/// Questions in the narrative are answered in the report.
///
/// # Safety
/// `engine` must be a live handle, `story_text` nul-terminated and
/// `out_json` a valid pointer. The returned string must be released with
/// `sr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn sr_interpret(
    engine: *const SrEngine,
    story_text: *const c_char,
    out_json: *mut *mut c_char,
) -> SrStatus {
    guard(|| {
        if out_json.is_null() {
            set_error("`out_json` is null");
            return SrStatus::NullArgument;
        }
        *out_json = ptr::null_mut();
        let Some(e) = engine.as_ref() else {
            set_error("`engine` is null");
            return SrStatus::NullArgument;
        };
        let text = match opt_str(story_text) {
            Ok(Some(t)) => t,
            Ok(None) => {
                set_error("`story_text` is null");
                return SrStatus::NullArgument;
            }
            Err(s) => return s,
        };
        let src = Sources {
            domain: e.domain.as_deref(),
            frame_rules: e.frame_rules.as_deref(),
            strict_frames: e.strict_frames,
        };
        let story = match load_story(&text, &src) {
            Ok(s) => s,
            Err(err) => {
                set_error(err.to_string());
                return SrStatus::ParseError;
            }
        };
        let d = &story.domain;
        let interp = interpret(d, &story.history, &e.config);
        let mut answers = Vec::new();
        for q in &story.narrative.questions {
            match answer(d, &interp.models, q) {
                Ok(a) => answers.push(a),
                Err(err) => {
                    set_error(format!("question `{q}`: {err}"));
                    return SrStatus::QuestionError;
                }
            }
        }
        let report = build_report(d, &e.config, story.history.len(), &interp, answers, story.warnings.clone());
        let json = CString::new(to_json(&report)).expect("JSON has no nul bytes");
        *out_json = json.into_raw();
        if interp.models.is_empty() {
            set_error(match &interp.failure {
                Some(f) => format!("no interpretation: {f}"),
                None => "no interpretation".to_string(),
            });
            SrStatus::NoModel
        } else {
            SrStatus::Ok
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn sr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
