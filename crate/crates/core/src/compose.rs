//! Merging a round's placed circuits into one device-wide circuit, ASAP
//! timing and duration/usage accounting.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{CircuitIR, GateKind, GateOp};
use crate::hardware::HardwareModel;
use crate::layout::{BatchPlan, LayoutMap, Round};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error("physical qubit {qubit} is used by both {first} and {second}")]
    Collision {
        qubit: usize,
        first: String,
        second: String,
    },
    #[error("layout of {name} does not cover its {n_qubits} qubits")]
    PartialLayout { name: String, n_qubits: usize },
    #[error("layout of {name} uses qubit {qubit} outside the device")]
    OutsideDevice { name: String, qubit: usize },
}

/// One member of a composed round.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub name: String,
    /// Index into the compiled queue.
    pub circuit_index: usize,
    /// The member's own circuit, in program-qubit numbering.
    pub circuit: CircuitIR,
    pub layout: LayoutMap,
    /// First classical bit of this member in the composed circuit.
    pub clbit_offset: usize,
    /// `positions[j]` is the composed-gate index of member gate `j`.
    pub positions: Vec<usize>,
}

impl Member {
    pub fn clbits(&self) -> std::ops::Range<usize> {
        self.clbit_offset..self.clbit_offset + self.circuit.n_clbits
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComposedRound {
    /// Device-wide circuit: qubit `i` is physical qubit `i`.
    pub circuit: CircuitIR,
    pub members: Vec<Member>,
    pub schedule: Schedule,
}

impl ComposedRound {
    pub fn duration(&self) -> u64 {
        self.schedule.duration
    }

    pub fn used_qubits(&self) -> usize {
        self.members.iter().map(|m| m.layout.len()).sum()
    }
}

/// Start and end time of every gate, in dt.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schedule {
    pub start: Vec<u64>,
    pub end: Vec<u64>,
    pub duration: u64,
}

/// Number of native cx a cx between qubits `h` hops apart costs when it has to
/// be routed: `3(h-1)` for the swaps plus the gate itself.
pub fn routed_cx_count(hops: usize) -> u64 {
    3 * (hops.max(1) as u64 - 1) + 1
}

pub fn gate_duration(g: &GateOp, h: &HardwareModel) -> u64 {
    let d = h.durations();
    match g.kind {
        GateKind::Barrier => 0,
        GateKind::Measure => d.measure,
        GateKind::Cx => {
            let hops = h.hop_distance(g.qubits[0], g.qubits[1]).unwrap_or(1);
            d.cx * routed_cx_count(hops)
        }
        _ => d.single_qubit,
    }
}

/// As-soon-as-possible timing of a device-wide circuit. A barrier takes no
/// time but synchronizes its qubits.
pub fn schedule_asap(c: &CircuitIR, h: &HardwareModel) -> Schedule {
    let mut free_at = vec![0u64; c.n_qubits];
    let mut s = Schedule {
        start: Vec::with_capacity(c.gates.len()),
        end: Vec::with_capacity(c.gates.len()),
        duration: 0,
    };
    for g in &c.gates {
        let t0 = g.qubits.iter().map(|&q| free_at[q]).max().unwrap_or(0);
        let t1 = t0 + gate_duration(g, h);
        for &q in &g.qubits {
            free_at[q] = t1;
        }
        s.start.push(t0);
        s.end.push(t1);
        s.duration = s.duration.max(t1);
    }
    s
}

fn check_layouts(members: &[(&str, &CircuitIR, &LayoutMap)], h: &HardwareModel) -> Result<(), ComposeError> {
    let mut owner: Vec<Option<&str>> = vec![None; h.n_qubits()];
    for &(name, c, layout) in members {
        if layout.len() != c.n_qubits {
            return Err(ComposeError::PartialLayout {
                name: name.to_string(),
                n_qubits: c.n_qubits,
            });
        }
        for &q in layout.as_slice() {
            if q >= h.n_qubits() {
                return Err(ComposeError::OutsideDevice {
                    name: name.to_string(),
                    qubit: q,
                });
            }
            if let Some(first) = owner[q] {
                return Err(ComposeError::Collision {
                    qubit: q,
                    first: first.to_string(),
                    second: name.to_string(),
                });
            }
            owner[q] = Some(name);
        }
    }
    Ok(())
}

fn map_gate(g: &GateOp, layout: &LayoutMap, clbit_offset: usize) -> GateOp {
    GateOp {
        kind: g.kind,
        qubits: g.qubits.iter().map(|&q| layout.get(q)).collect(),
        params: g.params.clone(),
        clbit: g.clbit.map(|b| b + clbit_offset),
    }
}

struct Builder {
    circuit: CircuitIR,
    members: Vec<Member>,
}

impl Builder {
    fn new(name: String, members: Vec<(String, usize, CircuitIR, LayoutMap)>, h: &HardwareModel) -> Builder {
        let mut offset = 0;
        let members: Vec<Member> = members
            .into_iter()
            .map(|(name, circuit_index, circuit, layout)| {
                let m = Member {
                    name,
                    circuit_index,
                    layout,
                    clbit_offset: offset,
                    positions: Vec::with_capacity(circuit.gates.len()),
                    circuit,
                };
                offset += m.circuit.n_clbits;
                m
            })
            .collect();
        Builder {
            circuit: CircuitIR::new(name, h.n_qubits(), offset),
            members,
        }
    }

    fn emit(&mut self, member: usize, gate: usize) {
        let m = &mut self.members[member];
        let g = map_gate(&m.circuit.gates[gate], &m.layout, m.clbit_offset);
        m.positions.push(self.circuit.gates.len());
        self.circuit.gates.push(g);
    }

    fn finish(self, h: &HardwareModel) -> ComposedRound {
        let schedule = schedule_asap(&self.circuit, h);
        ComposedRound {
            circuit: self.circuit,
            members: self.members,
            schedule,
        }
    }
}

fn round_members(round: &Round, queue: &[CircuitIR]) -> Vec<(String, usize, CircuitIR, LayoutMap)> {
    round
        .members
        .iter()
        .map(|p| {
            (
                p.name.clone(),
                p.circuit,
                queue[p.circuit].clone(),
                p.layout.clone(),
            )
        })
        .collect()
}

/// Merges a round. Member gate streams are interleaved round-robin; only
/// the order within each member is preserved.
pub fn compose_round(
    name: impl Into<String>,
    round: &Round,
    queue: &[CircuitIR],
    h: &HardwareModel,
) -> Result<ComposedRound, ComposeError> {
    compose_members(name, round_members(round, queue), h)
}

/// [`compose_round`] over explicit `(name, circuit, layout)` members.
pub fn compose_members(
    name: impl Into<String>,
    members: Vec<(String, usize, CircuitIR, LayoutMap)>,
    h: &HardwareModel,
) -> Result<ComposedRound, ComposeError> {
    let refs: Vec<(&str, &CircuitIR, &LayoutMap)> =
        members.iter().map(|(n, _, c, l)| (n.as_str(), c, l)).collect();
    check_layouts(&refs, h)?;
    let mut b = Builder::new(name.into(), members, h);
    let lens: Vec<usize> = b.members.iter().map(|m| m.circuit.gates.len()).collect();
    let longest = lens.iter().copied().max().unwrap_or(0);
    for j in 0..longest {
        for (i, &len) in lens.iter().enumerate() {
            if j < len {
                b.emit(i, j);
            }
        }
    }
    Ok(b.finish(h))
}

/// Composition for simultaneous benchmarking: each member is split at its
/// own barriers into layers, and layer `k` of every member is followed by a
/// barrier across all used qubits so layers start together.
pub fn compose_aligned(
    name: impl Into<String>,
    members: Vec<(String, usize, CircuitIR, LayoutMap)>,
    h: &HardwareModel,
) -> Result<ComposedRound, ComposeError> {
    let refs: Vec<(&str, &CircuitIR, &LayoutMap)> =
        members.iter().map(|(n, _, c, l)| (n.as_str(), c, l)).collect();
    check_layouts(&refs, h)?;
    let mut b = Builder::new(name.into(), members, h);
    let layers: Vec<Vec<Vec<usize>>> = b
        .members
        .iter()
        .map(|m| {
            let mut out = vec![Vec::new()];
            for (j, g) in m.circuit.gates.iter().enumerate() {
                out.last_mut().unwrap().push(j);
                if g.kind == GateKind::Barrier {
                    out.push(Vec::new());
                }
            }
            out
        })
        .collect();
    let mut all: Vec<usize> = b.members.iter().flat_map(|m| m.layout.image()).collect();
    all.sort_unstable();
    let n_layers = layers.iter().map(Vec::len).max().unwrap_or(0);
    for k in 0..n_layers {
        if k > 0 && !all.is_empty() {
            b.circuit.gates.push(GateOp::barrier(all.clone()));
        }
        for (i, member_layers) in layers.iter().enumerate() {
            if let Some(layer) = member_layers.get(k) {
                for &j in layer {
                    b.emit(i, j);
                }
            }
        }
    }
    Ok(b.finish(h))
}

/// Duration and hardware usage of a compiled plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionEstimate {
    pub round_durations: Vec<u64>,
    pub total_duration: u64,
    pub round_usage: Vec<f64>,
    pub mean_usage: f64,
}

pub fn estimate(
    plan: &BatchPlan,
    queue: &[CircuitIR],
    h: &HardwareModel,
) -> Result<ExecutionEstimate, ComposeError> {
    let mut round_durations = Vec::with_capacity(plan.rounds.len());
    let mut round_usage = Vec::with_capacity(plan.rounds.len());
    for (i, round) in plan.rounds.iter().enumerate() {
        let cr = compose_round(format!("round_{i:03}"), round, queue, h)?;
        round_durations.push(cr.duration());
        round_usage.push(round.used_qubits() as f64 / h.n_qubits() as f64);
    }
    let mean_usage = if round_usage.is_empty() {
        0.0
    } else {
        round_usage.iter().sum::<f64>() / round_usage.len() as f64
    };
    Ok(ExecutionEstimate {
        total_duration: round_durations.iter().sum(),
        round_durations,
        round_usage,
        mean_usage,
    })
}
