use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn quilt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quilt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = quilt(args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn report(dir: &Path) -> Value {
    let text = fs::read_to_string(dir.join("report.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let schema: Value = serde_json::from_str(quilt::report::SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
    v
}

fn dir_files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (PathBuf::from(p.file_name().unwrap()), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

/// Replays `manifest.json` from `dir` into a fresh directory and compares.
fn replay_matches(dir: &Path) {
    let again = tempfile::tempdir().unwrap();
    let manifest = dir.join("manifest.json");
    ok(&["run", "--manifest", manifest.to_str().unwrap(), "--out", again.path().to_str().unwrap()]);
    assert_eq!(dir_files(dir), dir_files(again.path()));
}

#[test]
fn compile_writes_plan_and_round_files() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    ok(&["compile", "--circuits", "bench:all", "--buffer", "1", "--out", o]);
    let v = report(out.path());
    assert_eq!(v["manifest"]["command"], "compile");
    let total = v["estimate"]["total_duration"].as_u64().unwrap();
    assert_eq!(v["shot_duration"].as_u64(), Some(total * 8192));
    let rounds = v["plan"]["rounds"].as_array().unwrap().len();
    assert!(rounds >= 1);
    for r in 0..rounds {
        let qasm = fs::read_to_string(out.path().join(format!("round_{r:03}.qasm"))).unwrap();
        quilt::qasm::parse_str(&qasm, "round.qasm").unwrap();
        assert!(out.path().join(format!("round_{r:03}.layout.json")).exists());
    }
    assert!(out.path().join("plan.json").exists());
    replay_matches(out.path());
}

#[test]
fn deeper_buffer_never_needs_fewer_rounds() {
    let rounds = |d: &str| {
        let out = tempfile::tempdir().unwrap();
        ok(&["compile", "--circuits", "workload:30", "--buffer", d, "--out", out.path().to_str().unwrap()]);
        report(out.path())["plan"]["rounds"].as_array().unwrap().len()
    };
    assert!(rounds("3") >= rounds("0"));
}

#[test]
fn noiseless_simulate_is_perfect_and_replays() {
    let out = tempfile::tempdir().unwrap();
    ok(&[
        "simulate", "--circuits", "bench:all", "--noiseless", "--shots", "256", "--seed", "4",
        "--out", out.path().to_str().unwrap(),
    ]);
    let v = report(out.path());
    for m in v["members"].as_array().unwrap() {
        assert_eq!(m["pst"], 1.0, "{m}");
    }
    assert_eq!(v["mean_pst"], 1.0);
    let csv = fs::read_to_string(out.path().join("counts.csv")).unwrap();
    assert!(csv.lines().count() > 1);
    replay_matches(out.path());
}

#[test]
fn characterize_emits_survival_tables() {
    let out = tempfile::tempdir().unwrap();
    ok(&[
        "characterize", "--device", "preset:falcon27", "--targets", "0-1,4-7", "--lengths", "1,4,16",
        "--samples", "2", "--rb-shots", "64", "--seed", "1", "--out", out.path().to_str().unwrap(),
    ]);
    let v = report(out.path());
    let ch = &v["characterization"];
    assert_eq!(ch["isolated"].as_array().unwrap().len(), 2);
    let csv = fs::read_to_string(out.path().join("survival_simrb.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("target,length,sample,survival"));
    assert_eq!(csv.lines().count(), 1 + 2 * 3 * 2);
    replay_matches(out.path());
}

#[test]
fn sweep_reports_gain_per_gamma() {
    let out = tempfile::tempdir().unwrap();
    ok(&[
        "sweep", "--circuits", "bench:all", "--buffers", "0,2", "--repeats", "2", "--gammas", "1,3",
        "--shots", "128", "--seed", "7", "--with-ct", "--lengths", "1,4,16", "--samples", "2",
        "--rb-shots", "64", "--out", out.path().to_str().unwrap(),
    ]);
    let v = report(out.path());
    let pts = v["sweep"].as_array().unwrap();
    assert_eq!(pts.len(), 2);
    assert_eq!(pts[0]["g_by_repeat"].as_array().unwrap().len(), 2);
    assert!(pts[0]["ct"].is_number());
    let scatter = fs::read_to_string(out.path().join("scatter.csv")).unwrap();
    assert_eq!(scatter.lines().next(), Some("gamma,ct,g"));
    replay_matches(out.path());
}

#[test]
fn argument_errors_exit_two() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    // sweep without an explicit seed
    assert_eq!(quilt(&["sweep", "--circuits", "bench:adder", "--buffers", "0,2", "--out", o]).status.code(), Some(2));
    // single buffer value
    assert_eq!(
        quilt(&["sweep", "--circuits", "bench:adder", "--buffers", "0", "--seed", "1", "--out", o]).status.code(),
        Some(2)
    );
    // overlapping targets
    assert_eq!(
        quilt(&["characterize", "--targets", "0-1,1-2", "--out", o]).status.code(),
        Some(2)
    );
    assert_eq!(quilt(&["simulate", "--circuits", "bench:adder", "--shots", "0", "--out", o]).status.code(), Some(2));
}

#[test]
fn input_errors_go_to_stderr() {
    let src = tempfile::tempdir().unwrap();
    fs::write(src.path().join("a.qasm"), "OPENQASM 2.0;\nqreg q[2];\ncz q[0],q[1];\n").unwrap();
    fs::write(src.path().join("b.qasm"), "OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n").unwrap();
    let out = tempfile::tempdir().unwrap();
    let r = quilt(&["compile", "--circuits", src.path().to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("a.qasm:3:1"), "{err}");
    assert!(err.contains("b.qasm:3:1"), "{err}");
    assert!(!out.path().join("report.json").exists());

    let empty = tempfile::tempdir().unwrap();
    let r = quilt(&["compile", "--circuits", empty.path().to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("no input circuits"));
}

#[test]
fn exported_preset_loads_back() {
    let out = tempfile::tempdir().unwrap();
    let dev = out.path().join("dev.json");
    ok(&["export", "device", "falcon27", "--out", dev.to_str().unwrap()]);
    let sim = out.path().join("sim");
    ok(&[
        "compile", "--device", dev.to_str().unwrap(), "--circuits", "bench:adder", "--out", sim.to_str().unwrap(),
    ]);
    assert_eq!(report(&sim)["device"]["n_qubits"], 27);
    let schema = out.path().join("schema.json");
    ok(&["export", "schema", "--out", schema.to_str().unwrap()]);
    assert_eq!(fs::read_to_string(schema).unwrap(), quilt::report::SCHEMA);
}
