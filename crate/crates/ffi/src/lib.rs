//! C ABI over the quilt compiler.
//!
//! Every fallible function returns a [`QuiltStatus`]; on failure the
//! message is available from [`quilt_last_error`] on the same thread.
//! Objects are opaque handles released with their `_free` function.
//! Strings returned through `char **` must be released with
//! [`quilt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quilt::hardware::{load_calibration, presets};
use quilt::layout::{physical_distance_layout, FitRule, LayoutOptions};
use quilt::qasm::{parse_qasm, SourceProgram};
use quilt::sim::{simulate_plan, NoiseModel, NoiseParams};
use quilt::{BatchPlan, CircuitIR, HardwareModel};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuiltStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Load = 4,
    Layout = 5,
    Simulation = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// Parsed circuit.
pub struct QuiltCircuit(CircuitIR);

/// Device model with calibration.
pub struct QuiltDevice(HardwareModel);

/// Compiled plan together with the inputs it was compiled from.
pub struct QuiltPlan {
    plan: BatchPlan,
    queue: Vec<CircuitIR>,
    device: HardwareModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: QuiltStatus, msg: impl Into<String>) -> QuiltStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into [`QuiltStatus::Panic`].
fn guard(f: impl FnOnce() -> QuiltStatus) -> QuiltStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == QuiltStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(QuiltStatus::Panic, msg)
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, QuiltStatus> {
    if p.is_null() {
        return Err(fail(QuiltStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(QuiltStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> QuiltStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            QuiltStatus::Ok
        }
        Err(_) => fail(QuiltStatus::InvalidUtf8, "output contains a NUL byte"),
    }
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($p:expr, $what:literal) => {
        if $p.is_null() {
            return fail(QuiltStatus::NullPointer, concat!($what, " is null"));
        }
    };
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn quilt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn quilt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses OpenQASM 2.0 text. `origin` names the source in diagnostics and
/// may be null.
///
/// # Safety
/// `text` and `origin` must be NUL-terminated or null; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn quilt_circuit_parse(
    text: *const c_char,
    origin: *const c_char,
    out: *mut *mut QuiltCircuit,
) -> QuiltStatus {
    guard(|| {
        non_null!(out, "out");
        let text = try_status!(str_arg(text, "text"));
        let origin = if origin.is_null() {
            "<input>"
        } else {
            try_status!(str_arg(origin, "origin"))
        };
        let src = SourceProgram::new(text, origin);
        match parse_qasm(&src) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(QuiltCircuit(c)));
                QuiltStatus::Ok
            }
            Err(diags) => {
                let lines: Vec<String> = diags.iter().map(|d| d.render(origin)).collect();
                fail(QuiltStatus::Parse, lines.join("\n"))
            }
        }
    })
}

/// # Safety
/// `c` must come from [`quilt_circuit_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn quilt_circuit_free(c: *mut QuiltCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Zero for a null handle.
///
/// # Safety
/// `c` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn quilt_circuit_num_qubits(c: *const QuiltCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.n_qubits)
}

/// # Safety
/// `c` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn quilt_circuit_cx_count(c: *const QuiltCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.cx_count())
}

/// # Safety
/// `c` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn quilt_circuit_cx_depth(c: *const QuiltCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.cx_depth())
}

/// Loads a calibration document.
///
/// # Safety
/// `json` must be NUL-terminated or null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn quilt_device_load_json(
    json: *const c_char,
    out: *mut *mut QuiltDevice,
) -> QuiltStatus {
    guard(|| {
        non_null!(out, "out");
        let json = try_status!(str_arg(json, "json"));
        match load_calibration(json) {
            Ok(h) => {
                *out = Box::into_raw(Box::new(QuiltDevice(h)));
                QuiltStatus::Ok
            }
            Err(e) => fail(QuiltStatus::Load, e.to_string()),
        }
    })
}

/// Bundled device by name, e.g. `falcon27`.
///
/// # Safety
/// `name` must be NUL-terminated or null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn quilt_device_preset(
    name: *const c_char,
    out: *mut *mut QuiltDevice,
) -> QuiltStatus {
    guard(|| {
        non_null!(out, "out");
        let name = try_status!(str_arg(name, "name"));
        match presets::preset(name) {
            Ok(h) => {
                *out = Box::into_raw(Box::new(QuiltDevice(h)));
                QuiltStatus::Ok
            }
            Err(e) => fail(QuiltStatus::Load, e.to_string()),
        }
    })
}

/// # Safety
/// `d` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn quilt_device_free(d: *mut QuiltDevice) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn quilt_device_num_qubits(d: *const QuiltDevice) -> usize {
    d.as_ref().map_or(0, |d| d.0.n_qubits())
}

/// Allocates `n` circuits to rounds with buffer distance `buffer`. The
/// plan keeps its own copies of the device and circuits.
///
/// # Safety
/// `device` must be live; `circuits` must point to `n` live handles;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn quilt_plan_compile(
    device: *const QuiltDevice,
    circuits: *const *const QuiltCircuit,
    n: usize,
    buffer: usize,
    allow_exact_fit: bool,
    out: *mut *mut QuiltPlan,
) -> QuiltStatus {
    guard(|| {
        non_null!(out, "out");
        non_null!(device, "device");
        if n > 0 {
            non_null!(circuits, "circuits");
        }
        let mut queue = Vec::with_capacity(n);
        for i in 0..n {
            match (*circuits.add(i)).as_ref() {
                Some(c) => queue.push(c.0.clone()),
                None => return fail(QuiltStatus::NullPointer, format!("circuit {i} is null")),
            }
        }
        if queue.is_empty() {
            return fail(QuiltStatus::Layout, "no input circuits");
        }
        let device = (*device).0.clone();
        let opts = LayoutOptions {
            buffer,
            fit: if allow_exact_fit {
                FitRule::AllowExact
            } else {
                FitRule::Strict
            },
        };
        let plan = physical_distance_layout(&queue, &device, &opts);
        *out = Box::into_raw(Box::new(QuiltPlan {
            plan,
            queue,
            device,
        }));
        QuiltStatus::Ok
    })
}

/// # Safety
/// `p` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn quilt_plan_free(p: *mut QuiltPlan) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn quilt_plan_num_rounds(p: *const QuiltPlan) -> usize {
    p.as_ref().map_or(0, |p| p.plan.rounds.len())
}

/// Circuits that could not be placed.
///
/// # Safety
/// `p` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn quilt_plan_num_leftover(p: *const QuiltPlan) -> usize {
    p.as_ref().map_or(0, |p| p.plan.leftover.len())
}

/// Members in `round`; zero when out of range.
///
/// # Safety
/// `p` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn quilt_plan_round_len(p: *const QuiltPlan, round: usize) -> usize {
    p.as_ref()
        .and_then(|p| p.plan.rounds.get(round))
        .map_or(0, |r| r.members.len())
}

unsafe fn placement<'a>(
    p: *const QuiltPlan,
    round: usize,
    member: usize,
) -> Result<&'a quilt::layout::Placement, QuiltStatus> {
    let p = p
        .as_ref()
        .ok_or_else(|| fail(QuiltStatus::NullPointer, "plan is null"))?;
    p.plan
        .rounds
        .get(round)
        .and_then(|r| r.members.get(member))
        .ok_or_else(|| fail(QuiltStatus::OutOfRange, format!("no member {member} in round {round}")))
}

/// Input index of a member.
///
/// # Safety
/// `p` must be live; `circuit_index` must be writable.
#[no_mangle]
pub unsafe extern "C" fn quilt_plan_member(
    p: *const QuiltPlan,
    round: usize,
    member: usize,
    circuit_index: *mut usize,
) -> QuiltStatus {
    guard(|| {
        non_null!(circuit_index, "circuit_index");
        let pl = try_status!(placement(p, round, member));
        *circuit_index = pl.circuit;
        QuiltStatus::Ok
    })
}

/// Copies a member's layout (program qubit `i` sits on `buf[i]`). `len`
/// receives the layout length even when `cap` is too small, in which case
/// nothing is copied and `OutOfRange` is returned.
///
/// # Safety
/// `p` must be live; `buf` must hold `cap` values; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn quilt_plan_layout(
    p: *const QuiltPlan,
    round: usize,
    member: usize,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> QuiltStatus {
    guard(|| {
        non_null!(len, "len");
        let pl = try_status!(placement(p, round, member));
        let layout = pl.layout.as_slice();
        *len = layout.len();
        if cap < layout.len() {
            return fail(
                QuiltStatus::OutOfRange,
                format!("buffer holds {cap} values, layout has {}", layout.len()),
            );
        }
        if !layout.is_empty() {
            non_null!(buf, "buf");
            ptr::copy_nonoverlapping(layout.as_ptr(), buf, layout.len());
        }
        QuiltStatus::Ok
    })
}

/// The plan as JSON.
///
/// # Safety
/// `p` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn quilt_plan_to_json(p: *const QuiltPlan, out: *mut *mut c_char) -> QuiltStatus {
    guard(|| {
        non_null!(out, "out");
        let Some(p) = p.as_ref() else {
            return fail(QuiltStatus::NullPointer, "plan is null");
        };
        match serde_json::to_string(&p.plan) {
            Ok(s) => put_string(out, s),
            Err(e) => fail(QuiltStatus::Layout, e.to_string()),
        }
    })
}

/// Simulates every round and returns the member results as a JSON array.
/// `gamma` scales cx errors per overlapping nearby cx; pairs at most
/// `hop_threshold` hops apart couple.
///
/// # Safety
/// `p` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn quilt_plan_simulate_json(
    p: *const QuiltPlan,
    gamma: f64,
    hop_threshold: usize,
    shots: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> QuiltStatus {
    guard(|| {
        non_null!(out, "out");
        let Some(p) = p.as_ref() else {
            return fail(QuiltStatus::NullPointer, "plan is null");
        };
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return fail(QuiltStatus::OutOfRange, "gamma must be a non-negative number");
        }
        let params = NoiseParams {
            gamma,
            hop_threshold,
            ..NoiseParams::default()
        };
        let nm = NoiseModel::new(&p.device, params);
        match simulate_plan(&p.plan, &p.queue, &nm, shots, seed) {
            Ok(results) => match serde_json::to_string(&results) {
                Ok(s) => put_string(out, s),
                Err(e) => fail(QuiltStatus::Simulation, e.to_string()),
            },
            Err(e) => fail(QuiltStatus::Simulation, e.to_string()),
        }
    })
}
