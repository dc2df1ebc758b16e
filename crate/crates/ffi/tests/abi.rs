use std::ffi::{CStr, CString};
use std::ptr;

use quilt_ffi::*;

const BELL: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\nh q[0];\ncx q[0],q[1];\nmeasure q -> c;\n";

fn last_error() -> String {
    unsafe { CStr::from_ptr(quilt_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn parse(text: &str) -> Result<*mut QuiltCircuit, QuiltStatus> {
    let text = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    let s = unsafe { quilt_circuit_parse(text.as_ptr(), ptr::null(), &mut out) };
    if s == QuiltStatus::Ok {
        Ok(out)
    } else {
        Err(s)
    }
}

fn preset(name: &str) -> *mut QuiltDevice {
    let name = CString::new(name).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { quilt_device_preset(name.as_ptr(), &mut out) }, QuiltStatus::Ok);
    out
}

#[test]
fn circuit_queries() {
    let c = parse(BELL).unwrap();
    unsafe {
        assert_eq!(quilt_circuit_num_qubits(c), 2);
        assert_eq!(quilt_circuit_cx_count(c), 1);
        assert_eq!(quilt_circuit_cx_depth(c), 1);
        quilt_circuit_free(c);
        assert_eq!(quilt_circuit_num_qubits(ptr::null()), 0);
    }
}

#[test]
fn parse_error_sets_message() {
    let err = parse("OPENQASM 2.0;\nqreg q[2];\ncz q[0],q[1];\n").unwrap_err();
    assert_eq!(err, QuiltStatus::Parse);
    let msg = last_error();
    assert!(msg.starts_with("<input>:3:"), "{msg}");
    parse(BELL).map(|c| unsafe { quilt_circuit_free(c) }).unwrap();
    assert_eq!(last_error(), "");
}

#[test]
fn null_and_utf8_arguments() {
    let mut out = ptr::null_mut();
    let s = unsafe { quilt_circuit_parse(ptr::null(), ptr::null(), &mut out) };
    assert_eq!(s, QuiltStatus::NullPointer);
    let bad = [0xffu8, 0xfe, 0];
    let s = unsafe { quilt_circuit_parse(bad.as_ptr().cast(), ptr::null(), &mut out) };
    assert_eq!(s, QuiltStatus::InvalidUtf8);
    let s = unsafe { quilt_device_preset(ptr::null(), ptr::null_mut()) };
    assert_eq!(s, QuiltStatus::NullPointer);
}

#[test]
fn device_loading() {
    let d = preset("falcon27");
    unsafe {
        assert_eq!(quilt_device_num_qubits(d), 27);
        quilt_device_free(d);
    }
    let name = CString::new("nope").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { quilt_device_preset(name.as_ptr(), &mut out) }, QuiltStatus::Load);
    let json = CString::new(r#"{"name":"pair","n_qubits":2,"coupling":[[0,1]],"cx_error":{"0-1":0.01}}"#).unwrap();
    assert_eq!(unsafe { quilt_device_load_json(json.as_ptr(), &mut out) }, QuiltStatus::Ok);
    unsafe {
        assert_eq!(quilt_device_num_qubits(out), 2);
        quilt_device_free(out);
    }
    let json = CString::new("{}").unwrap();
    assert_eq!(unsafe { quilt_device_load_json(json.as_ptr(), &mut out) }, QuiltStatus::Load);
}

#[test]
fn compile_query_and_simulate() {
    let d = preset("falcon27");
    let circuits: Vec<*const QuiltCircuit> = (0..4).map(|_| parse(BELL).unwrap() as *const _).collect();
    let mut plan = ptr::null_mut();
    let s = unsafe { quilt_plan_compile(d, circuits.as_ptr(), circuits.len(), 1, false, &mut plan) };
    assert_eq!(s, QuiltStatus::Ok);
    unsafe {
        let rounds = quilt_plan_num_rounds(plan);
        let placed: usize = (0..rounds).map(|r| quilt_plan_round_len(plan, r)).sum();
        assert_eq!(placed + quilt_plan_num_leftover(plan), 4);
        let mut seen = [false; 4];
        for r in 0..rounds {
            for m in 0..quilt_plan_round_len(plan, r) {
                let mut idx = usize::MAX;
                assert_eq!(quilt_plan_member(plan, r, m, &mut idx), QuiltStatus::Ok);
                seen[idx] = true;
                let mut buf = [0usize; 2];
                let mut len = 0;
                assert_eq!(quilt_plan_layout(plan, r, m, buf.as_mut_ptr(), 2, &mut len), QuiltStatus::Ok);
                assert_eq!(len, 2);
                assert_ne!(buf[0], buf[1]);
                assert_eq!(
                    quilt_plan_layout(plan, r, m, buf.as_mut_ptr(), 1, &mut len),
                    QuiltStatus::OutOfRange
                );
            }
        }
        assert!(seen.iter().all(|&s| s));
        let mut idx = 0;
        assert_eq!(quilt_plan_member(plan, rounds, 0, &mut idx), QuiltStatus::OutOfRange);

        let mut json = ptr::null_mut();
        assert_eq!(quilt_plan_to_json(plan, &mut json), QuiltStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["buffer"], 1);
        quilt_string_free(json);

        let mut json = ptr::null_mut();
        assert_eq!(quilt_plan_simulate_json(plan, 1.0, 1, 128, 5, &mut json), QuiltStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        quilt_string_free(json);
        let results: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
        assert_eq!(results.len(), placed);
        let mut again = ptr::null_mut();
        quilt_plan_simulate_json(plan, 1.0, 1, 128, 5, &mut again);
        assert_eq!(CStr::from_ptr(again).to_str().unwrap(), text);
        quilt_string_free(again);

        assert_eq!(
            quilt_plan_simulate_json(plan, f64::NAN, 1, 128, 5, &mut again),
            QuiltStatus::OutOfRange
        );
        assert_eq!(
            quilt_plan_simulate_json(plan, 1.0, 1, 0, 5, &mut again),
            QuiltStatus::Simulation
        );

        quilt_plan_free(plan);
        for c in circuits {
            quilt_circuit_free(c as *mut _);
        }
        quilt_device_free(d);
    }
}

#[test]
fn empty_compile_is_an_error() {
    let d = preset("falcon27");
    let mut plan = ptr::null_mut();
    let s = unsafe { quilt_plan_compile(d, ptr::null(), 0, 0, false, &mut plan) };
    assert_eq!(s, QuiltStatus::Layout);
    assert_eq!(last_error(), "no input circuits");
    unsafe { quilt_device_free(d) };
}
