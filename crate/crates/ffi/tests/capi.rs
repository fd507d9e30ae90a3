//! Exercises the C surface the way a foreign caller would: through raw
//! pointers and status codes, with the JSON results parsed back to check the
//! pipeline really ran.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use plofc_ffi::*;

const EX1: &str = include_str!("../../../programs/ex1.mimp");
const EX1_BUGGY: &str = include_str!("../../../programs/ex1_buggy.mimp");
const INPUTS: &str = r#"{"a": 3, "b": 4}"#;

fn parse(src: &str) -> (PlofcStatus, *mut PlofcProgram) {
    let c = CString::new(src).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { plofc_program_parse(c.as_ptr(), &mut out) };
    (status, out)
}

fn handle(src: &str) -> *mut PlofcProgram {
    let (status, p) = parse(src);
    assert_eq!(status, PlofcStatus::Ok);
    assert!(!p.is_null());
    p
}

fn take_string(s: *mut c_char) -> String {
    assert!(!s.is_null(), "expected a string result");
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { plofc_string_free(s) };
    text
}

fn take_json(s: *mut c_char) -> serde_json::Value {
    serde_json::from_str(&take_string(s)).expect("result is json")
}

fn last_error() -> String {
    let msg = plofc_last_error_message();
    assert!(!msg.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(msg) }.to_str().unwrap().to_owned()
}

#[test]
fn parse_and_emit_round_trip() {
    let p = handle(EX1);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { plofc_program_emit(p, &mut text) }, PlofcStatus::Ok);
    let emitted = take_string(text);
    assert!(emitted.contains("if (x1 < y1)"));

    // The emitted text must parse back to a program that emits identically.
    let p2 = handle(&emitted);
    let mut text2 = ptr::null_mut();
    assert_eq!(unsafe { plofc_program_emit(p2, &mut text2) }, PlofcStatus::Ok);
    assert_eq!(take_string(text2), emitted);

    unsafe {
        plofc_program_free(p);
        plofc_program_free(p2);
    }
}

#[test]
fn trace_reports_the_executed_path() {
    let p = handle(EX1);
    let inputs = CString::new(INPUTS).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { plofc_trace_json(p, inputs.as_ptr(), &mut out) };
    assert_eq!(status, PlofcStatus::Ok);
    let v = take_json(out);
    assert_eq!(v["executed"], serde_json::json!([1, 2, 3, 4, 6, 7, 9, 10]));
    assert_eq!(v["final"]["z1"], 17);
    unsafe { plofc_program_free(p) };
}

#[test]
fn blocks_enumerate_paths_under_the_cap() {
    let p = handle(EX1);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { plofc_blocks_json(p, 20, &mut out) }, PlofcStatus::Ok);
    let v = take_json(out);
    assert_eq!(v["blocks"].as_array().unwrap().len(), 7);
    assert_eq!(v["paths"].as_array().unwrap().len(), 4);

    let mut out = ptr::null_mut();
    let status = unsafe { plofc_blocks_json(p, 1, &mut out) };
    assert_eq!(status, PlofcStatus::AnalysisError);
    assert!(out.is_null());
    assert!(last_error().contains("exceed the path cap"));
    unsafe { plofc_program_free(p) };
}

#[test]
fn deps_return_all_three_sets() {
    let p = handle(EX1);
    let inputs = CString::new(INPUTS).unwrap();
    let target = CString::new("z1").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { plofc_deps_json(p, inputs.as_ptr(), target.as_ptr(), &mut out) };
    assert_eq!(status, PlofcStatus::Ok);
    let v = take_json(out);
    assert_eq!(v["constants"].as_array().unwrap().len(), 4);
    assert_eq!(v["set1"].as_array().unwrap().len(), 5);
    assert_eq!(v["set2"].as_array().unwrap().len(), 8);
    assert_eq!(v["final"].as_array().unwrap().len(), 7);
    unsafe { plofc_program_free(p) };
}

#[test]
fn diagnose_finds_the_seeded_fault() {
    let p = handle(EX1_BUGGY);
    let inputs = CString::new(INPUTS).unwrap();
    let target = CString::new("z1").unwrap();
    let mut out = ptr::null_mut();
    let status =
        unsafe { plofc_diagnose_json(p, inputs.as_ptr(), target.as_ptr(), 17, &mut out) };
    assert_eq!(status, PlofcStatus::Ok);
    let v = take_json(out);
    assert_eq!(v["observed"], 19);
    assert_eq!(v["od"], 2);
    assert_eq!(v["plofc"], serde_json::json!([4, 9, 10]));
    assert_eq!(v["repairs"].as_array().unwrap().len(), 3);
    unsafe { plofc_program_free(p) };
}

#[test]
fn null_pointers_are_rejected() {
    let mut out = ptr::null_mut();
    let status = unsafe { plofc_program_parse(ptr::null(), &mut out) };
    assert_eq!(status, PlofcStatus::NullPointer);
    assert!(out.is_null());
    assert_eq!(last_error(), "src must not be null");

    let src = CString::new(EX1).unwrap();
    let status = unsafe { plofc_program_parse(src.as_ptr(), ptr::null_mut()) };
    assert_eq!(status, PlofcStatus::NullPointer);

    let inputs = CString::new(INPUTS).unwrap();
    let mut text = ptr::null_mut();
    let status = unsafe { plofc_trace_json(ptr::null(), inputs.as_ptr(), &mut text) };
    assert_eq!(status, PlofcStatus::NullPointer);
    assert!(last_error().contains("program"));
}

#[test]
fn invalid_utf8_is_rejected() {
    let bytes: &[u8] = b"x = 1;\xff\xfe\0";
    let mut out = ptr::null_mut();
    let status = unsafe { plofc_program_parse(bytes.as_ptr().cast::<c_char>(), &mut out) };
    assert_eq!(status, PlofcStatus::InvalidUtf8);
    assert!(out.is_null());
    assert!(last_error().contains("not valid UTF-8"));
}

#[test]
fn parse_errors_carry_their_message() {
    let (status, p) = parse("x = ;\n");
    assert_eq!(status, PlofcStatus::ParseError);
    assert!(p.is_null());
    assert!(last_error().contains("syntax error at line 1"));
}

#[test]
fn runtime_errors_surface_as_their_own_status() {
    let p = handle(EX1);
    let inputs = CString::new("{}").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { plofc_trace_json(p, inputs.as_ptr(), &mut out) };
    assert_eq!(status, PlofcStatus::RuntimeError);
    assert!(out.is_null());
    assert!(last_error().contains("unbound"));
    unsafe { plofc_program_free(p) };
}

#[test]
fn malformed_inputs_are_an_invalid_argument() {
    let p = handle(EX1);
    let inputs = CString::new("not json").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { plofc_trace_json(p, inputs.as_ptr(), &mut out) };
    assert_eq!(status, PlofcStatus::InvalidArgument);
    assert!(last_error().contains("invalid inputs"));
    unsafe { plofc_program_free(p) };
}

#[test]
fn errors_clear_on_the_next_successful_call() {
    let (status, _) = parse("x = ;\n");
    assert_eq!(status, PlofcStatus::ParseError);
    let p = handle(EX1);
    assert!(plofc_last_error_message().is_null());
    unsafe { plofc_program_free(p) };
}

#[test]
fn header_declares_the_whole_surface() {
    let header = include_str!("../include/plofc.h");
    let functions = [
        "plofc_program_parse",
        "plofc_program_free",
        "plofc_program_emit",
        "plofc_trace_json",
        "plofc_blocks_json",
        "plofc_deps_json",
        "plofc_diagnose_json",
        "plofc_string_free",
        "plofc_last_error_message",
    ];
    for name in functions {
        assert!(header.contains(name), "header is missing {name}");
    }
    for (name, code) in [
        ("PLOFC_OK", PlofcStatus::Ok as i32),
        ("PLOFC_NULL_POINTER", PlofcStatus::NullPointer as i32),
        ("PLOFC_INVALID_UTF8", PlofcStatus::InvalidUtf8 as i32),
        ("PLOFC_PARSE_ERROR", PlofcStatus::ParseError as i32),
        ("PLOFC_RUNTIME_ERROR", PlofcStatus::RuntimeError as i32),
        ("PLOFC_ANALYSIS_ERROR", PlofcStatus::AnalysisError as i32),
        ("PLOFC_INVALID_ARGUMENT", PlofcStatus::InvalidArgument as i32),
    ] {
        assert!(
            header.contains(&format!("{name} = {code}")),
            "header is missing {name} = {code}"
        );
    }
    assert!(header.contains("typedef struct PlofcProgram PlofcProgram"));
}
