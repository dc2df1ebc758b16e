use std::fmt::Write;

use super::SourceProgram;
use crate::circuit::{CircuitIR, GateKind};

/// Renders a circuit as OpenQASM 2.0 over a single `q`/`c` register pair.
pub fn emit_qasm(c: &CircuitIR) -> SourceProgram {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg q[{}];", c.n_qubits).unwrap();
    if c.n_clbits > 0 {
        writeln!(out, "creg c[{}];", c.n_clbits).unwrap();
    }
    for g in &c.gates {
        match g.kind {
            GateKind::Measure => {
                writeln!(out, "measure q[{}] -> c[{}];", g.qubits[0], g.clbit.unwrap_or(0)).unwrap();
            }
            _ => {
                out.push_str(g.kind.name());
                if !g.params.is_empty() {
                    let ps: Vec<String> = g.params.iter().map(|p| p.to_string()).collect();
                    write!(out, "({})", ps.join(",")).unwrap();
                }
                let qs: Vec<String> = g.qubits.iter().map(|q| format!("q[{q}]")).collect();
                writeln!(out, " {};", qs.join(",")).unwrap();
            }
        }
    }
    SourceProgram::new(out, c.name.clone())
}
