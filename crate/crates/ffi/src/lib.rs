//! C ABI over `contagion-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_from_*`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`ContagionStatus`]; on failure [`contagion_last_error`] holds a
//! message for the calling thread. Strings returned through out-parameters are
//! owned by the caller and must be released with [`contagion_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use contagion_core::io::{emit_metrics, ingest_transcript, parse_scenario, parse_scenario_str, summarize_steps, ScenarioConfig};
use contagion_core::observation::{detect_emotions, preprocess, score_sentiment, Lexicon};
use contagion_core::sim::{run_scenario, RunTrace};
use contagion_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContagionStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ProtocolViolation = 4,
    Configuration = 5,
    Parse = 6,
    InsufficientHistory = 7,
    Io = 8,
    OutOfRange = 9,
    Panic = 10,
}

/// Parsed, validated scenario.
pub struct ContagionScenario(ScenarioConfig);

/// Completed run.
pub struct ContagionTrace(RunTrace);

pub struct ContagionLexicon(Lexicon);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ContagionEmotionVector {
    pub joy: f64,
    pub sadness: f64,
    pub anger: f64,
    pub fear: f64,
    pub neutral: f64,
    pub valence: f64,
    pub intensity: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(err: &Error) -> ContagionStatus {
    match err {
        Error::InvalidArgument(_) => ContagionStatus::InvalidArgument,
        Error::ProtocolViolation(_) => ContagionStatus::ProtocolViolation,
        Error::Configuration { .. } => ContagionStatus::Configuration,
        Error::Parse { .. } => ContagionStatus::Parse,
        Error::InsufficientHistory { .. } => ContagionStatus::InsufficientHistory,
        Error::Io { .. } => ContagionStatus::Io,
    }
}

type Fallible<T> = Result<T, ContagionStatus>;

fn fail(status: ContagionStatus, message: impl Into<String>) -> ContagionStatus {
    set_error(message);
    status
}

fn core<T>(r: contagion_core::Result<T>) -> Fallible<T> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn guard(body: impl FnOnce() -> Fallible<()>) -> ContagionStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ContagionStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(ContagionStatus::Panic, "internal panic"),
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Fallible<&'a T> {
    p.as_ref().ok_or_else(|| fail(ContagionStatus::NullPointer, format!("{what} is null")))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &str) -> Fallible<&'a mut T> {
    p.as_mut().ok_or_else(|| fail(ContagionStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Fallible<&'a str> {
    if p.is_null() {
        return Err(fail(ContagionStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(ContagionStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Fallible<()> {
    let slot = borrow_mut(out, "out")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Fallible<()> {
    let slot = borrow_mut(out, "out")?;
    let c = CString::new(s).map_err(|_| fail(ContagionStatus::InvalidArgument, "string contains NUL"))?;
    *slot = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread; do not free.
#[no_mangle]
pub extern "C" fn contagion_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static version string; do not free.
#[no_mangle]
pub extern "C" fn contagion_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn contagion_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a scenario document. `base_dir` (nullable) resolves relative paths
/// such as the lexicon; null means the current directory.
///
/// # Safety
/// `json` and `base_dir` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn contagion_scenario_from_json(
    json: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut ContagionScenario,
) -> ContagionStatus {
    guard(|| {
        let json = text(json, "json")?;
        let base = if base_dir.is_null() { "." } else { text(base_dir, "base_dir")? };
        let config = core(parse_scenario_str(json, Path::new(base)))?;
        put(out, ContagionScenario(config))
    })
}

/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn contagion_scenario_from_file(path: *const c_char, out: *mut *mut ContagionScenario) -> ContagionStatus {
    guard(|| {
        let config = core(parse_scenario(text(path, "path")?))?;
        put(out, ContagionScenario(config))
    })
}

/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn contagion_scenario_set_seed(scenario: *mut ContagionScenario, seed: u64) -> ContagionStatus {
    guard(|| {
        borrow_mut(scenario, "scenario")?.0.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn contagion_scenario_set_orchestration(scenario: *mut ContagionScenario, enabled: bool) -> ContagionStatus {
    guard(|| {
        borrow_mut(scenario, "scenario")?.0.orchestration.enabled = enabled;
        Ok(())
    })
}

/// Scenario as canonical JSON.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn contagion_scenario_to_json(scenario: *const ContagionScenario, out: *mut *mut c_char) -> ContagionStatus {
    guard(|| put_string(out, borrow(scenario, "scenario")?.0.to_json()))
}

/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn contagion_scenario_free(scenario: *mut ContagionScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn contagion_run(scenario: *const ContagionScenario, out: *mut *mut ContagionTrace) -> ContagionStatus {
    guard(|| {
        let trace = core(run_scenario(&borrow(scenario, "scenario")?.0))?;
        put(out, ContagionTrace(trace))
    })
}

/// Number of recorded steps, 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn contagion_trace_step_count(trace: *const ContagionTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.steps.len())
}

/// Number of humans, 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn contagion_trace_human_count(trace: *const ContagionTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.initial_valences.len())
}

/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn contagion_trace_total_interventions(trace: *const ContagionTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.total_interventions())
}

/// Copy the valences after `step` into `buf`, which must hold `len` values.
/// `len` must be at least the human count.
///
/// # Safety
/// `trace` must be a live handle; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn contagion_trace_valences(
    trace: *const ContagionTrace,
    step: usize,
    buf: *mut f64,
    len: usize,
) -> ContagionStatus {
    guard(|| {
        let t = &borrow(trace, "trace")?.0;
        let record = t
            .steps
            .get(step)
            .ok_or_else(|| fail(ContagionStatus::OutOfRange, format!("step {step} of {}", t.steps.len())))?;
        if buf.is_null() {
            return Err(fail(ContagionStatus::NullPointer, "buf is null"));
        }
        if len < record.valences.len() {
            return Err(fail(
                ContagionStatus::OutOfRange,
                format!("buffer holds {len}, need {}", record.valences.len()),
            ));
        }
        std::slice::from_raw_parts_mut(buf, record.valences.len()).copy_from_slice(&record.valences);
        Ok(())
    })
}

/// # Safety
/// `trace` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn contagion_trace_mean_valence(trace: *const ContagionTrace, step: usize, out: *mut f64) -> ContagionStatus {
    guard(|| {
        let t = &borrow(trace, "trace")?.0;
        let record = t
            .steps
            .get(step)
            .ok_or_else(|| fail(ContagionStatus::OutOfRange, format!("step {step} of {}", t.steps.len())))?;
        *borrow_mut(out, "out")? = record.mean_valence;
        Ok(())
    })
}

/// One JSON object per step, newline separated.
///
/// # Safety
/// `trace` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn contagion_trace_to_jsonl(trace: *const ContagionTrace, out: *mut *mut c_char) -> ContagionStatus {
    guard(|| put_string(out, borrow(trace, "trace")?.0.to_jsonl()))
}

/// # Safety
/// `trace` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn contagion_trace_summary_json(trace: *const ContagionTrace, out: *mut *mut c_char) -> ContagionStatus {
    guard(|| {
        let summary = core(summarize_steps(&borrow(trace, "trace")?.0.steps))?;
        put_string(out, serde_json::to_string(&summary).expect("summary serializes"))
    })
}

/// Write metrics.csv, trace.jsonl, summary.json and policy.json into `dir`.
///
/// # Safety
/// `trace` must be a live handle; `dir` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn contagion_trace_emit(trace: *const ContagionTrace, dir: *const c_char) -> ContagionStatus {
    guard(|| {
        let t = borrow(trace, "trace")?;
        core(emit_metrics(&t.0, text(dir, "dir")?)).map(|_| ())
    })
}

/// # Safety
/// `trace` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn contagion_trace_free(trace: *mut ContagionTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

#[no_mangle]
pub extern "C" fn contagion_lexicon_builtin() -> *mut ContagionLexicon {
    Box::into_raw(Box::new(ContagionLexicon(Lexicon::builtin())))
}

/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn contagion_lexicon_from_file(path: *const c_char, out: *mut *mut ContagionLexicon) -> ContagionStatus {
    guard(|| {
        let lexicon = core(Lexicon::from_file(text(path, "path")?))?;
        put(out, ContagionLexicon(lexicon))
    })
}

/// # Safety
/// `lexicon` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn contagion_lexicon_free(lexicon: *mut ContagionLexicon) {
    if !lexicon.is_null() {
        drop(Box::from_raw(lexicon));
    }
}

/// Sentiment of raw text in [-1, 1].
///
/// # Safety
/// `lexicon` must be a live handle, `utterance` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn contagion_score_sentiment(
    lexicon: *const ContagionLexicon,
    utterance: *const c_char,
    out: *mut f64,
) -> ContagionStatus {
    guard(|| {
        let lex = &borrow(lexicon, "lexicon")?.0;
        let score = score_sentiment(&preprocess(text(utterance, "utterance")?), lex);
        *borrow_mut(out, "out")? = score;
        Ok(())
    })
}

/// # Safety
/// `lexicon` must be a live handle, `utterance` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn contagion_detect_emotions(
    lexicon: *const ContagionLexicon,
    utterance: *const c_char,
    out: *mut ContagionEmotionVector,
) -> ContagionStatus {
    guard(|| {
        let lex = &borrow(lexicon, "lexicon")?.0;
        let v = detect_emotions(&preprocess(text(utterance, "utterance")?), lex);
        *borrow_mut(out, "out")? = ContagionEmotionVector {
            joy: v.joy,
            sadness: v.sadness,
            anger: v.anger,
            fear: v.fear,
            neutral: v.neutral,
            valence: v.valence,
            intensity: v.intensity,
        };
        Ok(())
    })
}

/// Analyze a JSONL transcript and return the report as JSON.
///
/// # Safety
/// `path` must be NUL-terminated, `lexicon` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn contagion_analyze_transcript(
    path: *const c_char,
    lexicon: *const ContagionLexicon,
    out: *mut *mut c_char,
) -> ContagionStatus {
    guard(|| {
        let lex = &borrow(lexicon, "lexicon")?.0;
        let report = core(ingest_transcript(text(path, "path")?, lex))?;
        put_string(out, report.to_json())
    })
}
