//! Stochastic Pauli simulation of composed rounds.
//!
//! Each member runs in its own statevector. Members only interact through
//! the crosstalk term: a cx error is multiplied by `gamma^k`, where `k`
//! counts other members' cx gates that overlap it in time and sit within
//! the hop threshold on the device.
//!
//! Bitstrings put classical bit 0 in the rightmost character.

mod noise;
pub mod statevector;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use noise::{NoiseModel, NoiseParams};
use statevector::{Pauli1, StateVector};

use crate::circuit::{CircuitIR, GateKind};
use crate::compose::{compose_round, ComposeError, ComposedRound, Member};
use crate::layout::BatchPlan;

/// Largest member simulated by default.
pub const DEFAULT_MAX_QUBITS: usize = 14;
/// Ideal outcomes at or below this probability are dropped.
pub const PROB_CUTOFF: f64 = 1e-9;
/// Probability mass the correct-output set must cover.
pub const CORRECT_MASS: f64 = 0.99;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("{name} has {n_qubits} qubits, the statevector limit is {max}")]
    TooLarge {
        name: String,
        n_qubits: usize,
        max: usize,
    },
    #[error("shot count must be at least 1")]
    ZeroShots,
}

/// Exact output distribution of a circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealOutputs {
    pub probs: BTreeMap<String, f64>,
}

impl IdealOutputs {
    /// Smallest set of most likely strings covering [`CORRECT_MASS`]; ties
    /// go to the smaller string.
    pub fn correct_set(&self) -> Vec<String> {
        let mut v: Vec<(&String, f64)> = self.probs.iter().map(|(s, &p)| (s, p)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(b.0)));
        let total: f64 = v.iter().map(|x| x.1).sum();
        let mut acc = 0.0;
        let mut out = Vec::new();
        for (s, p) in v {
            if acc >= CORRECT_MASS * total - 1e-12 {
                break;
            }
            acc += p;
            out.push(s.clone());
        }
        out.sort();
        out
    }
}

pub fn bitstring(bits: &[bool]) -> String {
    bits.iter().rev().map(|&b| if b { '1' } else { '0' }).collect()
}

fn check_size(c: &CircuitIR, max: usize) -> Result<(), SimError> {
    if c.n_qubits > max {
        Err(SimError::TooLarge {
            name: c.name.clone(),
            n_qubits: c.n_qubits,
            max,
        })
    } else {
        Ok(())
    }
}

pub fn ideal_outputs(c: &CircuitIR) -> Result<IdealOutputs, SimError> {
    ideal_outputs_bounded(c, DEFAULT_MAX_QUBITS)
}

/// Exact simulation; mid-circuit measurements are followed branch by branch.
pub fn ideal_outputs_bounded(c: &CircuitIR, max_qubits: usize) -> Result<IdealOutputs, SimError> {
    check_size(c, max_qubits)?;
    let mut probs: BTreeMap<String, f64> = BTreeMap::new();
    if c.has_terminal_measurements() {
        let mut s = StateVector::zero(c.n_qubits);
        for g in &c.gates {
            s.apply_gate(g);
        }
        let measures: Vec<(usize, usize)> = c
            .gates
            .iter()
            .filter(|g| g.kind == GateKind::Measure)
            .map(|g| (g.qubits[0], g.clbit.unwrap_or(0)))
            .collect();
        let mut bits = vec![false; c.n_clbits];
        for (idx, p) in s.probabilities().into_iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            bits.iter_mut().for_each(|b| *b = false);
            for &(q, cb) in &measures {
                bits[cb] = idx >> q & 1 == 1;
            }
            *probs.entry(bitstring(&bits)).or_insert(0.0) += p;
        }
    } else {
        let mut stack = vec![(StateVector::zero(c.n_qubits), vec![false; c.n_clbits], 1.0, 0usize)];
        'branch: while let Some((mut s, mut bits, p, start)) = stack.pop() {
            let mut j = start;
            while j < c.gates.len() {
                let g = &c.gates[j];
                j += 1;
                if g.kind != GateKind::Measure {
                    s.apply_gate(g);
                    continue;
                }
                let q = g.qubits[0];
                let p1 = s.prob_one(q);
                if p1 > 1e-15 && 1.0 - p1 > 1e-15 {
                    let mut s1 = s.clone();
                    s1.collapse(q, true);
                    let mut b1 = bits.clone();
                    b1[g.clbit.unwrap_or(0)] = true;
                    stack.push((s1, b1, p * p1, j));
                    s.collapse(q, false);
                    bits[g.clbit.unwrap_or(0)] = false;
                    stack.push((s, bits, p * (1.0 - p1), j));
                    continue 'branch;
                }
                let one = p1 > 0.5;
                s.collapse(q, one);
                bits[g.clbit.unwrap_or(0)] = one;
            }
            *probs.entry(bitstring(&bits)).or_insert(0.0) += p;
        }
    }
    probs.retain(|_, p| *p > PROB_CUTOFF);
    Ok(IdealOutputs { probs })
}

/// Shot histogram of one member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberCounts {
    pub name: String,
    pub circuit_index: usize,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
    /// Set when the member was not simulated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// PST: shots landing in `correct` over all shots.
pub fn pst(counts: &BTreeMap<String, u64>, correct: &[String]) -> f64 {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return 0.0;
    }
    let ok: u64 = correct.iter().filter_map(|s| counts.get(s)).sum();
    ok as f64 / total as f64
}

/// `member,bitstring,count` rows.
pub fn counts_csv(members: &[MemberCounts]) -> String {
    let mut out = String::from("member,bitstring,count\n");
    for m in members {
        for (s, n) in &m.counts {
            writeln!(out, "{},{},{}", m.name, s, n).unwrap();
        }
    }
    out
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// RNG of one shot of one member stream.
pub fn shot_rng(seed: u64, stream: u64, shot: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(splitmix(splitmix(seed) ^ stream) ^ shot))
}

/// Per-gate noise of one member, resolved against the round.
struct MemberNoise {
    gates: Vec<crate::circuit::GateOp>,
    n_qubits: usize,
    n_clbits: usize,
    /// Error (or readout flip) probability after each gate.
    p: Vec<f64>,
    /// Idle error probability per operand before each gate.
    idle: Vec<Vec<f64>>,
    terminal: bool,
}

fn cx_crosstalk(cr: &ComposedRound, m: usize, pos: usize, nm: &NoiseModel) -> usize {
    let (s, e) = (cr.schedule.start[pos], cr.schedule.end[pos]);
    let g = &cr.circuit.gates[pos];
    let pair = (g.qubits[0], g.qubits[1]);
    cr.members
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != m)
        .flat_map(|(_, other)| other.positions.iter().copied())
        .filter(|&p| {
            let og = &cr.circuit.gates[p];
            og.is_cx()
                && cr.schedule.start[p] < e
                && s < cr.schedule.end[p]
                && nm.couples(pair, (og.qubits[0], og.qubits[1]))
        })
        .count()
}

fn member_noise(cr: &ComposedRound, m: usize, nm: &NoiseModel) -> MemberNoise {
    let member: &Member = &cr.members[m];
    let c = &member.circuit;
    let mut last_end = vec![0u64; c.n_qubits];
    let mut p = Vec::with_capacity(c.gates.len());
    let mut idle = Vec::with_capacity(c.gates.len());
    for (j, g) in c.gates.iter().enumerate() {
        let pos = member.positions[j];
        let phys: Vec<usize> = g.qubits.iter().map(|&q| member.layout.get(q)).collect();
        let start = cr.schedule.start[pos];
        idle.push(
            g.qubits
                .iter()
                .map(|&q| {
                    if g.kind == GateKind::Barrier {
                        0.0
                    } else {
                        nm.idle_error(start.saturating_sub(last_end[q]))
                    }
                })
                .collect(),
        );
        for &q in &g.qubits {
            last_end[q] = cr.schedule.end[pos];
        }
        p.push(match g.kind {
            GateKind::Barrier => 0.0,
            GateKind::Measure => nm.readout_error(phys[0]),
            GateKind::Cx => nm.cx_error(phys[0], phys[1], cx_crosstalk(cr, m, pos, nm)),
            _ => nm.sq_error(phys[0]),
        });
    }
    MemberNoise {
        gates: c.gates.clone(),
        n_qubits: c.n_qubits,
        n_clbits: c.n_clbits,
        p,
        idle,
        terminal: c.has_terminal_measurements(),
    }
}

/// Pauli injected just before gate `at` (or after the last gate).
#[derive(Clone, Copy)]
struct Event {
    at: usize,
    qubit: usize,
    pauli: Pauli1,
}

struct Shot {
    events: Vec<Event>,
    flips: Vec<bool>,
}

impl MemberNoise {
    fn draw_errors(&self, rng: &mut ChaCha8Rng) -> Shot {
        let mut events = Vec::new();
        let mut flips = vec![false; self.gates.len()];
        for (j, g) in self.gates.iter().enumerate() {
            for (k, &pi) in self.idle[j].iter().enumerate() {
                if pi > 0.0 && rng.gen::<f64>() < pi {
                    events.push(Event {
                        at: j,
                        qubit: g.qubits[k],
                        pauli: Pauli1(rng.gen_range(1..4)),
                    });
                }
            }
            match g.kind {
                GateKind::Barrier => {}
                GateKind::Measure => flips[j] = rng.gen::<f64>() < self.p[j],
                GateKind::Cx => {
                    if rng.gen::<f64>() < self.p[j] {
                        let idx: u8 = rng.gen_range(1..16);
                        for (k, pauli) in [(0, idx % 4), (1, idx / 4)] {
                            if pauli != 0 {
                                events.push(Event {
                                    at: j + 1,
                                    qubit: g.qubits[k],
                                    pauli: Pauli1(pauli),
                                });
                            }
                        }
                    }
                }
                _ => {
                    if rng.gen::<f64>() < self.p[j] {
                        events.push(Event {
                            at: j + 1,
                            qubit: g.qubits[0],
                            pauli: Pauli1(rng.gen_range(1..4)),
                        });
                    }
                }
            }
        }
        Shot { events, flips }
    }
}

/// Cached ideal evolution of a member with terminal measurements.
struct Prefix {
    /// `states[j]` is the state before gate `j`; cached only for small members.
    states: Vec<StateVector>,
    cumulative: Vec<(f64, usize)>,
}

const PREFIX_CACHE_QUBITS: usize = 10;

impl Prefix {
    fn build(mn: &MemberNoise) -> Prefix {
        let mut s = StateVector::zero(mn.n_qubits);
        let cache = mn.n_qubits <= PREFIX_CACHE_QUBITS;
        let mut states = Vec::new();
        for g in &mn.gates {
            if cache {
                states.push(s.clone());
            }
            s.apply_gate(g);
        }
        if cache {
            states.push(s.clone());
        }
        Prefix {
            states,
            cumulative: cumulative(&s),
        }
    }

    fn state_before(&self, mn: &MemberNoise, at: usize) -> StateVector {
        if let Some(s) = self.states.get(at) {
            return s.clone();
        }
        let mut s = StateVector::zero(mn.n_qubits);
        for g in &mn.gates[..at] {
            s.apply_gate(g);
        }
        s
    }
}

fn cumulative(s: &StateVector) -> Vec<(f64, usize)> {
    let mut acc = 0.0;
    s.probabilities()
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .map(|(i, p)| {
            acc += p;
            (acc, i)
        })
        .collect()
}

fn sample(cum: &[(f64, usize)], u: f64) -> usize {
    let total = cum.last().map_or(1.0, |x| x.0);
    let target = u * total;
    let i = cum.partition_point(|&(c, _)| c <= target);
    cum[i.min(cum.len() - 1)].1
}

fn run_terminal(mn: &MemberNoise, prefix: &Prefix, shot: &Shot, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let u: f64 = rng.gen();
    let idx = match shot.events.first() {
        None => sample(&prefix.cumulative, u),
        Some(first) => {
            let mut s = prefix.state_before(mn, first.at);
            let mut ev = shot.events.iter().peekable();
            for j in first.at..=mn.gates.len() {
                while let Some(e) = ev.next_if(|e| e.at == j) {
                    s.apply_pauli(e.qubit, e.pauli);
                }
                if let Some(g) = mn.gates.get(j) {
                    s.apply_gate(g);
                }
            }
            sample(&cumulative(&s), u)
        }
    };
    let mut bits = vec![false; mn.n_clbits];
    for (j, g) in mn.gates.iter().enumerate() {
        if g.kind == GateKind::Measure {
            bits[g.clbit.unwrap_or(0)] = (idx >> g.qubits[0] & 1 == 1) ^ shot.flips[j];
        }
    }
    bits
}

fn run_trajectory(mn: &MemberNoise, shot: &Shot, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut s = StateVector::zero(mn.n_qubits);
    let mut bits = vec![false; mn.n_clbits];
    let mut ev = shot.events.iter().peekable();
    for j in 0..=mn.gates.len() {
        while let Some(e) = ev.next_if(|e| e.at == j) {
            s.apply_pauli(e.qubit, e.pauli);
        }
        let Some(g) = mn.gates.get(j) else { break };
        if g.kind == GateKind::Measure {
            let q = g.qubits[0];
            let one = rng.gen::<f64>() < s.prob_one(q);
            s.collapse(q, one);
            bits[g.clbit.unwrap_or(0)] = one ^ shot.flips[j];
        } else {
            s.apply_gate(g);
        }
    }
    bits
}

/// Simulates every member of a composed round. Member `m` draws from the
/// RNG stream `circuit_index`, so a member's counts do not depend on which
/// other members share the round when crosstalk is off.
pub fn simulate_round(
    cr: &ComposedRound,
    nm: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Vec<MemberCounts>, SimError> {
    simulate_round_bounded(cr, nm, shots, seed, DEFAULT_MAX_QUBITS)
}

pub fn simulate_round_bounded(
    cr: &ComposedRound,
    nm: &NoiseModel,
    shots: u64,
    seed: u64,
    max_qubits: usize,
) -> Result<Vec<MemberCounts>, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let mut out = Vec::with_capacity(cr.members.len());
    for (m, member) in cr.members.iter().enumerate() {
        let mut mc = MemberCounts {
            name: member.name.clone(),
            circuit_index: member.circuit_index,
            shots,
            counts: BTreeMap::new(),
            skipped: None,
        };
        if let Err(e) = check_size(&member.circuit, max_qubits) {
            mc.skipped = Some(e.to_string());
            out.push(mc);
            continue;
        }
        let mn = member_noise(cr, m, nm);
        let prefix = mn.terminal.then(|| Prefix::build(&mn));
        let stream = member.circuit_index as u64;
        mc.counts = (0..shots)
            .into_par_iter()
            .fold(BTreeMap::new, |mut acc: BTreeMap<String, u64>, shot| {
                let mut rng = shot_rng(seed, stream, shot);
                let drawn = mn.draw_errors(&mut rng);
                let bits = match &prefix {
                    Some(p) => run_terminal(&mn, p, &drawn, &mut rng),
                    None => run_trajectory(&mn, &drawn, &mut rng),
                };
                *acc.entry(bitstring(&bits)).or_insert(0) += 1;
                acc
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            });
        out.push(mc);
    }
    Ok(out)
}

/// Simulation outcome of one placed circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberResult {
    pub round: usize,
    pub name: String,
    pub circuit_index: usize,
    pub layout: Vec<usize>,
    pub correct: Vec<String>,
    pub pst: Option<f64>,
    pub counts: MemberCounts,
}

#[derive(Debug, Error)]
pub enum PlanSimError {
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Composes and simulates every round of a plan.
pub fn simulate_plan(
    plan: &BatchPlan,
    queue: &[CircuitIR],
    nm: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Vec<MemberResult>, PlanSimError> {
    let mut ideal: BTreeMap<usize, Option<Vec<String>>> = BTreeMap::new();
    let mut out = Vec::new();
    for (ri, round) in plan.rounds.iter().enumerate() {
        let cr = compose_round(format!("round_{ri:03}"), round, queue, nm.device())?;
        let counts = simulate_round(&cr, nm, shots, seed)?;
        for (member, mc) in cr.members.iter().zip(counts) {
            let correct = ideal
                .entry(member.circuit_index)
                .or_insert_with(|| ideal_outputs(&member.circuit).ok().map(|o| o.correct_set()))
                .clone();
            let pst_value = match (&correct, &mc.skipped) {
                (Some(set), None) => Some(pst(&mc.counts, set)),
                _ => None,
            };
            out.push(MemberResult {
                round: ri,
                name: member.name.clone(),
                circuit_index: member.circuit_index,
                layout: member.layout.as_slice().to_vec(),
                correct: correct.unwrap_or_default(),
                pst: pst_value,
                counts: mc,
            });
        }
    }
    Ok(out)
}
