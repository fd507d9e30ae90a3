//! C bindings for the fault localization pipeline.
//!
//! The surface is deliberately small: parse a program into an opaque handle,
//! run one of the pipeline stages against it, and get the result back as a
//! JSON string in the same shape the command line prints. Every function
//! returns a status code; on failure `plofc_last_error_message` holds a
//! human-readable description until the next call on the same thread.
//!
//! Strings returned through out-parameters are owned by the caller and must
//! be released with `plofc_string_free`; handles with `plofc_program_free`.
//! The declarations live in `include/plofc.h`, which is maintained by hand
//! and checked against the exported surface by a test.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use plofc_core::blocks::{all_path_formula, build_blocks, enumerate_paths};
use plofc_core::deps::{final_set, set1, set2};
use plofc_core::diagnose::{analyze_path, predict_faulty_lines, FaultQuery};
use plofc_core::interp::execute;
use plofc_core::lang::{emit_source, parse, Program};
use plofc_core::report;
use plofc_core::Error;

/// Status codes shared with the C header.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlofcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    RuntimeError = 4,
    AnalysisError = 5,
    InvalidArgument = 6,
}

/// Opaque handle around a parsed program.
pub struct PlofcProgram {
    program: Program,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(e: &Error) -> PlofcStatus {
    match e {
        Error::Syntax { .. }
        | Error::UseBeforeAssign { .. }
        | Error::DuplicateLine { .. }
        | Error::UnorderedLine { .. } => PlofcStatus::ParseError,
        Error::UnboundVariable { .. } | Error::ArithmeticOverflow { .. } => {
            PlofcStatus::RuntimeError
        }
        Error::PathExplosion { .. }
        | Error::InconsistentTrace { .. }
        | Error::UnknownTarget { .. }
        | Error::TargetNotAssigned { .. }
        | Error::NoConstantsToMutate => PlofcStatus::AnalysisError,
        Error::InvalidInputs { .. } => PlofcStatus::InvalidArgument,
    }
}

fn fail(e: Error) -> PlofcStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

fn fail_null(what: &str) -> PlofcStatus {
    set_error(format!("{what} must not be null"));
    PlofcStatus::NullPointer
}

/// # Safety
/// `ptr` must be null or point at a NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, PlofcStatus> {
    if ptr.is_null() {
        return Err(fail_null(what));
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        PlofcStatus::InvalidUtf8
    })
}

fn write_string(out: *mut *mut c_char, text: String) -> PlofcStatus {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(_) => {
            set_error("result contained an interior NUL byte".to_string());
            return PlofcStatus::InvalidArgument;
        }
    };
    unsafe { *out = c.into_raw() };
    PlofcStatus::Ok
}

fn json_string(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

/// Parses MiniImp source into a program handle.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plofc_program_parse(
    src: *const c_char,
    out: *mut *mut PlofcProgram,
) -> PlofcStatus {
    clear_error();
    if out.is_null() {
        return fail_null("out");
    }
    unsafe { *out = ptr::null_mut() };
    let src = match unsafe { read_str(src, "src") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    match parse(src) {
        Ok(program) => {
            let handle = Box::new(PlofcProgram { program });
            unsafe { *out = Box::into_raw(handle) };
            PlofcStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a program handle. Null is a no-op.
///
/// # Safety
/// `p` must be null or a handle from `plofc_program_parse`.
#[no_mangle]
pub unsafe extern "C" fn plofc_program_free(p: *mut PlofcProgram) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Renders the program back to source text.
///
/// # Safety
/// `p` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plofc_program_emit(
    p: *const PlofcProgram,
    out: *mut *mut c_char,
) -> PlofcStatus {
    clear_error();
    if out.is_null() {
        return fail_null("out");
    }
    unsafe { *out = ptr::null_mut() };
    let Some(handle) = (unsafe { p.as_ref() }) else {
        return fail_null("program");
    };
    write_string(out, emit_source(&handle.program))
}

/// Executes the program and returns the trace as JSON.
///
/// # Safety
/// `p` must be a valid handle, `inputs_json` a NUL-terminated string, and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plofc_trace_json(
    p: *const PlofcProgram,
    inputs_json: *const c_char,
    out: *mut *mut c_char,
) -> PlofcStatus {
    clear_error();
    if out.is_null() {
        return fail_null("out");
    }
    unsafe { *out = ptr::null_mut() };
    let Some(handle) = (unsafe { p.as_ref() }) else {
        return fail_null("program");
    };
    let inputs = match unsafe { read_str(inputs_json, "inputs_json") } {
        Ok(s) => match report::parse_inputs_json(s) {
            Ok(env) => env,
            Err(e) => return fail(e),
        },
        Err(status) => return status,
    };
    match execute(&handle.program, &inputs) {
        Ok(trace) => write_string(out, json_string(&report::trace_json(&trace))),
        Err(e) => fail(e),
    }
}

/// Returns the block partition, formula, and enumerated paths as JSON.
///
/// # Safety
/// `p` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plofc_blocks_json(
    p: *const PlofcProgram,
    path_cap: u32,
    out: *mut *mut c_char,
) -> PlofcStatus {
    clear_error();
    if out.is_null() {
        return fail_null("out");
    }
    unsafe { *out = ptr::null_mut() };
    let Some(handle) = (unsafe { p.as_ref() }) else {
        return fail_null("program");
    };
    let blocks = build_blocks(&handle.program);
    let formula = all_path_formula(&blocks);
    match enumerate_paths(&formula, path_cap) {
        Ok(paths) => write_string(out, json_string(&report::blocks_json(&blocks, &formula, &paths))),
        Err(e) => fail(e),
    }
}

/// Returns the dependence sets along the executed path as JSON.
///
/// # Safety
/// `p` must be a valid handle, `inputs_json` and `target` NUL-terminated
/// strings, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plofc_deps_json(
    p: *const PlofcProgram,
    inputs_json: *const c_char,
    target: *const c_char,
    out: *mut *mut c_char,
) -> PlofcStatus {
    clear_error();
    if out.is_null() {
        return fail_null("out");
    }
    unsafe { *out = ptr::null_mut() };
    let Some(handle) = (unsafe { p.as_ref() }) else {
        return fail_null("program");
    };
    let inputs = match unsafe { read_str(inputs_json, "inputs_json") } {
        Ok(s) => match report::parse_inputs_json(s) {
            Ok(env) => env,
            Err(e) => return fail(e),
        },
        Err(status) => return status,
    };
    let target = match unsafe { read_str(target, "target") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let trace = match execute(&handle.program, &inputs) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    match analyze_path(&handle.program, &trace, target) {
        Ok(analysis) => {
            let records = &analysis.records;
            let value = report::deps_json(
                &analysis.table,
                &set1(records),
                &set2(records),
                &final_set(records),
            );
            write_string(out, json_string(&value))
        }
        Err(e) => fail(e),
    }
}

/// Runs the full diagnosis and returns the report as JSON.
///
/// # Safety
/// `p` must be a valid handle, `inputs_json` and `target` NUL-terminated
/// strings, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plofc_diagnose_json(
    p: *const PlofcProgram,
    inputs_json: *const c_char,
    target: *const c_char,
    desired: i64,
    out: *mut *mut c_char,
) -> PlofcStatus {
    clear_error();
    if out.is_null() {
        return fail_null("out");
    }
    unsafe { *out = ptr::null_mut() };
    let Some(handle) = (unsafe { p.as_ref() }) else {
        return fail_null("program");
    };
    let inputs = match unsafe { read_str(inputs_json, "inputs_json") } {
        Ok(s) => match report::parse_inputs_json(s) {
            Ok(env) => env,
            Err(e) => return fail(e),
        },
        Err(status) => return status,
    };
    let target = match unsafe { read_str(target, "target") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let query = match FaultQuery::new(handle.program.clone(), inputs, target, desired) {
        Ok(q) => q,
        Err(e) => return fail(e),
    };
    match predict_faulty_lines(&query) {
        Ok(rep) => write_string(out, json_string(&report::diagnosis_json(&rep))),
        Err(e) => fail(e),
    }
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn plofc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// The message of the last error on this thread, or null. The pointer stays
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn plofc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(ptr::null())
    })
}
