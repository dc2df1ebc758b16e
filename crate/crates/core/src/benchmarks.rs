//! Bundled benchmark circuits.
//!
//! Every bundled source is checked against its recorded qubit, gate and cx
//! counts when loaded, so a change in gate decomposition shows up as a load
//! error instead of silently shifting results. Gate counts exclude
//! measurements and barriers.

use thiserror::Error;

use crate::circuit::{CircuitIR, GateKind, GateOp};
use crate::qasm::{parse_qasm, Diagnostic, SourceProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchmarkSpec {
    pub name: &'static str,
    pub description: &'static str,
    pub qubits: usize,
    pub gates: usize,
    pub cx: usize,
    pub source: &'static str,
}

macro_rules! bench {
    ($name:literal, $desc:literal, $q:literal, $g:literal, $cx:literal) => {
        BenchmarkSpec {
            name: $name,
            description: $desc,
            qubits: $q,
            gates: $g,
            cx: $cx,
            source: include_str!(concat!("../data/benchmarks/", $name, ".qasm")),
        }
    };
}

pub const TABLE: [BenchmarkSpec; 7] = [
    bench!("deutsch", "Deutsch algorithm with 2 qubits for f(x) = x", 2, 5, 1),
    bench!("grover", "Grover's algorithm", 2, 16, 2),
    bench!("linearsolver", "Solver for a linear equation of one qubit", 3, 19, 4),
    bench!("toffoli", "Toffoli gate", 3, 18, 6),
    bench!("fredkin", "Fredkin gate", 3, 19, 8),
    bench!("adder", "Quantum ripple-carry adder", 4, 23, 10),
    bench!("error_correctiond3", "Error correction with distance 3 and 5 qubits", 5, 114, 49),
];

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("unknown benchmark '{0}'")]
    Unknown(String),
    #[error("benchmark {name} does not parse: {first}")]
    Parse { name: String, first: String },
    #[error("benchmark {name}: expected {what} = {expected}, found {found}")]
    CountMismatch {
        name: String,
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

impl BenchmarkSpec {
    /// Parses the bundled source and checks the recorded counts.
    pub fn load(&self) -> Result<CircuitIR, BenchmarkError> {
        let c = parse_qasm(&SourceProgram::new(self.source, self.name)).map_err(
            |d: Vec<Diagnostic>| BenchmarkError::Parse {
                name: self.name.to_string(),
                first: d.first().map(|d| d.to_string()).unwrap_or_default(),
            },
        )?;
        for (what, expected, found) in [
            ("qubits", self.qubits, c.n_qubits),
            ("gates", self.gates, c.gate_count()),
            ("cx", self.cx, c.cx_count()),
        ] {
            if expected != found {
                return Err(BenchmarkError::CountMismatch {
                    name: self.name.to_string(),
                    what,
                    expected,
                    found,
                });
            }
        }
        Ok(c)
    }
}

pub fn spec(name: &str) -> Option<&'static BenchmarkSpec> {
    TABLE.iter().find(|b| b.name == name)
}

pub fn load(name: &str) -> Result<CircuitIR, BenchmarkError> {
    spec(name)
        .ok_or_else(|| BenchmarkError::Unknown(name.to_string()))?
        .load()
}

/// All seven benchmarks in table order.
pub fn all() -> Result<Vec<CircuitIR>, BenchmarkError> {
    TABLE.iter().map(BenchmarkSpec::load).collect()
}

/// `n` circuits cycling through the table, named `<bench>_<index>`.
pub fn workload(n: usize) -> Result<Vec<CircuitIR>, BenchmarkError> {
    let base = all()?;
    Ok((0..n)
        .map(|i| {
            let mut c = base[i % base.len()].clone();
            c.name = format!("{}_{i:03}", c.name);
            c
        })
        .collect())
}

/// Toffoli on a 3-qubit line whose ends cannot interact directly. One swap
/// routes the target next to the far control, giving 10 sequential cx.
fn push_chain_toffoli(c: &mut CircuitIR) {
    use GateKind::*;
    let one = |c: &mut CircuitIR, k: GateKind, q: usize| {
        c.push(GateOp::single(k, q));
    };
    one(c, H, 2);
    c.push(GateOp::cx(2, 1)).push(GateOp::cx(1, 2));
    one(c, Tdg, 1);
    c.push(GateOp::cx(0, 1));
    one(c, T, 1);
    c.push(GateOp::cx(2, 1));
    one(c, Tdg, 1);
    c.push(GateOp::cx(0, 1));
    one(c, T, 2);
    one(c, T, 1);
    one(c, H, 1);
    c.push(GateOp::cx(1, 2)).push(GateOp::cx(2, 1)).push(GateOp::cx(1, 2));
    c.push(GateOp::cx(0, 1));
    one(c, T, 0);
    one(c, Tdg, 1);
    c.push(GateOp::cx(0, 1));
}

/// `reps` routed Toffolis on `|110>` (q0 = q1 = 1), measured. Odd `reps`
/// give `111`, even give `110`.
pub fn toffoli_chain(reps: usize) -> CircuitIR {
    let mut c = CircuitIR::new(format!("toffoli_chain_{}cx", 10 * reps), 3, 3);
    c.push(GateOp::single(GateKind::X, 0))
        .push(GateOp::single(GateKind::X, 1));
    for _ in 0..reps {
        push_chain_toffoli(&mut c);
    }
    for q in 0..3 {
        c.push(GateOp::measure(q, q));
    }
    c
}
