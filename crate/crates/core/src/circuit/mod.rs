//! Circuit intermediate representation.
//!
//! A [`CircuitIR`] is an ordered gate list over a flat qubit and classical-bit
//! index space. The dependency DAG and the weighted interaction graph are
//! derived views ([`dag`], [`interaction`]).

pub mod dag;
pub mod interaction;

use std::f64::consts::PI;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

pub use dag::{cx_depth, CircuitDag};
pub use interaction::{interaction_graph, InteractionGraph};

/// Gate kinds understood by the IR. `ccx` and `swap` never appear here; they
/// are decomposed by the frontend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    U1,
    U2,
    U3,
    Rz,
    Sx,
    X,
    H,
    T,
    Tdg,
    S,
    Sdg,
    Cx,
    Barrier,
    Measure,
}

impl GateKind {
    pub const ALL: [GateKind; 14] = [
        GateKind::U1,
        GateKind::U2,
        GateKind::U3,
        GateKind::Rz,
        GateKind::Sx,
        GateKind::X,
        GateKind::H,
        GateKind::T,
        GateKind::Tdg,
        GateKind::S,
        GateKind::Sdg,
        GateKind::Cx,
        GateKind::Barrier,
        GateKind::Measure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::U1 => "u1",
            GateKind::U2 => "u2",
            GateKind::U3 => "u3",
            GateKind::Rz => "rz",
            GateKind::Sx => "sx",
            GateKind::X => "x",
            GateKind::H => "h",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::Cx => "cx",
            GateKind::Barrier => "barrier",
            GateKind::Measure => "measure",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Number of angle parameters.
    pub fn param_count(self) -> usize {
        match self {
            GateKind::U1 | GateKind::Rz => 1,
            GateKind::U2 => 2,
            GateKind::U3 => 3,
            _ => 0,
        }
    }

    /// Fixed qubit arity, `None` for barriers.
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::Cx => Some(2),
            GateKind::Barrier => None,
            _ => Some(1),
        }
    }

    /// True for single-qubit unitaries.
    pub fn is_single_qubit(self) -> bool {
        !matches!(self, GateKind::Cx | GateKind::Barrier | GateKind::Measure)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate angle: an exact rational multiple of pi, or a plain float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Pi(Ratio<i64>),
    Value(f64),
}

impl Angle {
    pub fn pi_frac(num: i64, den: i64) -> Angle {
        Angle::Pi(Ratio::new(num, den))
    }

    pub fn zero() -> Angle {
        Angle::Pi(Ratio::from_integer(0))
    }

    pub fn radians(self) -> f64 {
        match self {
            Angle::Pi(r) => PI * (*r.numer() as f64) / (*r.denom() as f64),
            Angle::Value(v) => v,
        }
    }
}

impl fmt::Display for Angle {
    /// Renders in a form the QASM frontend parses back to the same value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Pi(r) => {
                let (n, d) = (*r.numer(), *r.denom());
                match (n, d) {
                    (0, _) => f.write_str("0"),
                    (1, 1) => f.write_str("pi"),
                    (-1, 1) => f.write_str("-pi"),
                    (n, 1) => write!(f, "{n}*pi"),
                    (1, d) => write!(f, "pi/{d}"),
                    (-1, d) => write!(f, "-pi/{d}"),
                    (n, d) => write!(f, "{n}*pi/{d}"),
                }
            }
            Angle::Value(v) => {
                let s = format!("{v:?}");
                if v.is_sign_negative() {
                    // unary minus is parsed as negation of the literal
                    write!(f, "-{}", &s[1..])
                } else {
                    f.write_str(&s)
                }
            }
        }
    }
}

/// One operation of a circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<Angle>,
    pub clbit: Option<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> GateOp {
        GateOp {
            kind,
            qubits,
            params: Vec::new(),
            clbit: None,
        }
    }

    pub fn with_params(kind: GateKind, qubits: Vec<usize>, params: Vec<Angle>) -> GateOp {
        GateOp {
            kind,
            qubits,
            params,
            clbit: None,
        }
    }

    pub fn cx(control: usize, target: usize) -> GateOp {
        GateOp::new(GateKind::Cx, vec![control, target])
    }

    pub fn single(kind: GateKind, qubit: usize) -> GateOp {
        GateOp::new(kind, vec![qubit])
    }

    pub fn measure(qubit: usize, clbit: usize) -> GateOp {
        GateOp {
            kind: GateKind::Measure,
            qubits: vec![qubit],
            params: Vec::new(),
            clbit: Some(clbit),
        }
    }

    pub fn barrier(qubits: Vec<usize>) -> GateOp {
        GateOp::new(GateKind::Barrier, qubits)
    }

    pub fn is_cx(&self) -> bool {
        self.kind == GateKind::Cx
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("gate {index} ({kind}): qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange {
        index: usize,
        kind: GateKind,
        qubit: usize,
        n_qubits: usize,
    },
    #[error("gate {index} (measure): clbit {clbit} out of range for {n_clbits} bits")]
    ClbitOutOfRange {
        index: usize,
        clbit: usize,
        n_clbits: usize,
    },
    #[error("gate {index} ({kind}): repeated qubit operand {qubit}")]
    RepeatedOperand {
        index: usize,
        kind: GateKind,
        qubit: usize,
    },
    #[error("gate {index} ({kind}): expected {expected} qubits, got {got}")]
    Arity {
        index: usize,
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("gate {index} ({kind}): expected {expected} parameters, got {got}")]
    Params {
        index: usize,
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("gate {index}: measure without a classical target")]
    MissingClbit { index: usize },
}

/// Gate-list form of one program circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitIR {
    pub name: String,
    pub n_qubits: usize,
    pub n_clbits: usize,
    pub gates: Vec<GateOp>,
}

impl CircuitIR {
    pub fn new(name: impl Into<String>, n_qubits: usize, n_clbits: usize) -> CircuitIR {
        CircuitIR {
            name: name.into(),
            n_qubits,
            n_clbits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: GateOp) -> &mut Self {
        self.gates.push(gate);
        self
    }

    /// Checks the operand invariants of every gate.
    pub fn validate(&self) -> Result<(), CircuitError> {
        for (index, g) in self.gates.iter().enumerate() {
            if let Some(expected) = g.kind.arity() {
                if g.qubits.len() != expected {
                    return Err(CircuitError::Arity {
                        index,
                        kind: g.kind,
                        expected,
                        got: g.qubits.len(),
                    });
                }
            }
            if g.params.len() != g.kind.param_count() {
                return Err(CircuitError::Params {
                    index,
                    kind: g.kind,
                    expected: g.kind.param_count(),
                    got: g.params.len(),
                });
            }
            for (i, &q) in g.qubits.iter().enumerate() {
                if q >= self.n_qubits {
                    return Err(CircuitError::QubitOutOfRange {
                        index,
                        kind: g.kind,
                        qubit: q,
                        n_qubits: self.n_qubits,
                    });
                }
                if g.qubits[..i].contains(&q) {
                    return Err(CircuitError::RepeatedOperand {
                        index,
                        kind: g.kind,
                        qubit: q,
                    });
                }
            }
            if g.kind == GateKind::Measure {
                match g.clbit {
                    None => return Err(CircuitError::MissingClbit { index }),
                    Some(c) if c >= self.n_clbits => {
                        return Err(CircuitError::ClbitOutOfRange {
                            index,
                            clbit: c,
                            n_clbits: self.n_clbits,
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn cx_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cx()).count()
    }

    /// Unitary gates only: measurements and barriers are not counted.
    pub fn gate_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| !matches!(g.kind, GateKind::Barrier | GateKind::Measure))
            .count()
    }

    /// Operations that are not barriers (unitaries plus measurements).
    pub fn op_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| g.kind != GateKind::Barrier)
            .count()
    }

    pub fn measure_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| g.kind == GateKind::Measure)
            .count()
    }

    /// Same register sizes and gate list; the name is ignored.
    pub fn same_structure(&self, other: &CircuitIR) -> bool {
        self.n_qubits == other.n_qubits
            && self.n_clbits == other.n_clbits
            && self.gates == other.gates
    }

    pub fn cx_depth(&self) -> usize {
        cx_depth(self)
    }

    pub fn interaction_graph(&self) -> InteractionGraph {
        interaction_graph(self)
    }

    /// True when no unitary touches a qubit after it has been measured.
    pub fn has_terminal_measurements(&self) -> bool {
        let mut measured = vec![false; self.n_qubits];
        for g in &self.gates {
            match g.kind {
                GateKind::Measure => measured[g.qubits[0]] = true,
                GateKind::Barrier => {}
                _ => {
                    if g.qubits.iter().any(|&q| measured[q]) {
                        return false;
                    }
                }
            }
        }
        true
    }
}
