//! Physical distance layout: greedy reliability-driven placement of queued
//! circuits with a hop buffer between concurrently placed circuits.
//!
//! Ties are always broken towards the lowest qubit index, then the
//! lexicographically smallest edge.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitIR, InteractionGraph};
use crate::hardware::{HardwareModel, HardwareState, ReliabilityGraph};

/// Program qubit `i` lives on physical qubit `physical[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LayoutMap {
    physical: Vec<usize>,
}

impl LayoutMap {
    pub fn new(physical: Vec<usize>) -> LayoutMap {
        LayoutMap { physical }
    }

    pub fn get(&self, program: usize) -> usize {
        self.physical[program]
    }

    pub fn len(&self) -> usize {
        self.physical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.physical.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.physical
    }

    /// Physical qubits used, sorted.
    pub fn image(&self) -> Vec<usize> {
        let mut v = self.physical.clone();
        v.sort_unstable();
        v
    }

    pub fn is_injective(&self) -> bool {
        let set: BTreeSet<usize> = self.physical.iter().copied().collect();
        set.len() == self.physical.len()
    }
}

/// Component size test used before placing a circuit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitRule {
    /// Largest free component must be strictly larger than the circuit.
    #[default]
    Strict,
    /// A component of exactly the circuit size is enough.
    AllowExact,
}

impl FitRule {
    pub fn admits(self, component: usize, circuit: usize) -> bool {
        match self {
            FitRule::Strict => component > circuit,
            FitRule::AllowExact => component >= circuit,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutOptions {
    pub buffer: usize,
    pub fit: FitRule,
}

impl LayoutOptions {
    pub fn with_buffer(buffer: usize) -> LayoutOptions {
        LayoutOptions {
            buffer,
            ..LayoutOptions::default()
        }
    }
}

/// No free region can hold the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoRoom;

impl fmt::Display for NoRoom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("no free region large enough")
    }
}

impl std::error::Error for NoRoom {}

/// Product of `r^w` over program edges; non-adjacent images score 0.
pub fn placement_score(g: &InteractionGraph, r: &ReliabilityGraph, phys: &[usize]) -> f64 {
    g.edges()
        .map(|((a, b), w)| {
            r.reliability(phys[a], phys[b])
                .map_or(0.0, |x| x.powi(w as i32))
        })
        .product()
}

/// Places one circuit, admitting components of exactly the circuit size.
pub fn allocate_one(
    g: &InteractionGraph,
    s: &HardwareState,
    r: &ReliabilityGraph,
) -> Result<LayoutMap, NoRoom> {
    allocate_one_with(g, s, r, FitRule::AllowExact)
}

/// Free qubit in a qualifying component, best seed edges first.
fn seed_edges(s: &HardwareState, r: &ReliabilityGraph, fit: FitRule, n: usize) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut allowed = Vec::new();
    for comp in s.connected_components() {
        if fit.admits(comp.len(), n) {
            allowed.extend(comp);
        }
    }
    allowed.sort_unstable();
    let allowed_set: BTreeSet<usize> = allowed.iter().copied().collect();
    let mut edges: Vec<((usize, usize), f64)> = r
        .edges()
        .filter(|((a, b), _)| allowed_set.contains(a) && allowed_set.contains(b))
        .collect();
    // stable sort keeps lexicographic order among equal reliabilities
    edges.sort_by(|x, y| y.1.total_cmp(&x.1));
    (allowed, edges.into_iter().map(|(e, _)| e).collect())
}

pub fn allocate_one_with(
    g: &InteractionGraph,
    s: &HardwareState,
    r: &ReliabilityGraph,
    fit: FitRule,
) -> Result<LayoutMap, NoRoom> {
    let n = g.node_count();
    if n == 0 {
        return Ok(LayoutMap::new(Vec::new()));
    }
    let (allowed, edges) = seed_edges(s, r, fit, n);
    if allowed.is_empty() {
        return Err(NoRoom);
    }
    let model = s.model();
    let mut grower = Grower::new(g, s, r);
    match g.heaviest_edge() {
        Some((p0, p1)) => {
            let &(h0, h1) = edges.first().ok_or(NoRoom)?;
            let mut best: Option<(f64, Vec<usize>)> = None;
            for (a, b) in [(h0, h1), (h1, h0)] {
                let mut attempt = grower.clone();
                attempt.place(p0, a);
                attempt.place(p1, b);
                if let Ok(phys) = attempt.complete() {
                    let score = placement_score(g, r, &phys);
                    if best.as_ref().is_none_or(|(s, _)| score > *s) {
                        best = Some((score, phys));
                    }
                }
            }
            best.map(|(_, p)| LayoutMap::new(p)).ok_or(NoRoom)
        }
        None => {
            let start = match edges.first() {
                Some(&(a, b)) => better_readout(model, a, b),
                None => *allowed
                    .iter()
                    .min_by(|&&a, &&b| model.readout_error(a).total_cmp(&model.readout_error(b)))
                    .expect("allowed is non-empty"),
            };
            grower.place(0, start);
            grower.complete().map(LayoutMap::new)
        }
    }
}

fn better_readout(m: &HardwareModel, a: usize, b: usize) -> usize {
    let (ea, eb) = (m.readout_error(a), m.readout_error(b));
    if eb < ea || (eb == ea && b < a) {
        b
    } else {
        a
    }
}

#[derive(Clone)]
struct Grower<'g, 's, 'm> {
    g: &'g InteractionGraph,
    s: &'s HardwareState<'m>,
    r: &'g ReliabilityGraph,
    phys: Vec<Option<usize>>,
    taken: BTreeSet<usize>,
}

impl<'g, 's, 'm> Grower<'g, 's, 'm> {
    fn new(g: &'g InteractionGraph, s: &'s HardwareState<'m>, r: &'g ReliabilityGraph) -> Self {
        Grower {
            g,
            s,
            r,
            phys: vec![None; g.node_count()],
            taken: BTreeSet::new(),
        }
    }

    fn place(&mut self, program: usize, physical: usize) {
        self.phys[program] = Some(physical);
        self.taken.insert(physical);
    }

    /// Free qubits adjacent to the current image, ascending.
    fn frontier(&self) -> Vec<usize> {
        let model = self.s.model();
        let mut out: BTreeSet<usize> = BTreeSet::new();
        for &t in &self.taken {
            for &n in model.neighbors(t) {
                if self.s.is_free(n) && !self.taken.contains(&n) {
                    out.insert(n);
                }
            }
        }
        out.into_iter().collect()
    }

    fn rel(&self, a: usize, b: usize) -> f64 {
        self.r.reliability(a, b).unwrap_or(0.0)
    }

    fn complete(mut self) -> Result<Vec<usize>, NoRoom> {
        let model = self.s.model();
        while let Some(next) = self.next_program_qubit() {
            let frontier = self.frontier();
            if frontier.is_empty() {
                return Err(NoRoom);
            }
            let placed_nbrs: Vec<(usize, u32)> = self
                .g
                .neighbors(next)
                .filter_map(|(p, w)| self.phys[p].map(|img| (img, w)))
                .collect();
            let target = if !placed_nbrs.is_empty() {
                // product over placed neighbours, then best single edge
                let key = |c: usize| {
                    let prod: f64 = placed_nbrs
                        .iter()
                        .map(|&(img, w)| self.rel(c, img).powi(w as i32))
                        .product();
                    let single = placed_nbrs
                        .iter()
                        .map(|&(img, _)| self.rel(c, img))
                        .fold(0.0, f64::max);
                    (prod, single)
                };
                pick_max(&frontier, |a, b| {
                    let (ka, kb) = (key(a), key(b));
                    ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
                })
            } else if self.g.degree_weight(next) > 0 {
                // new interaction component: next to the best free edge
                let key = |c: usize| {
                    model
                        .neighbors(c)
                        .iter()
                        .filter(|&&n| self.s.is_free(n) && !self.taken.contains(&n))
                        .map(|&n| self.rel(c, n))
                        .fold(0.0, f64::max)
                };
                pick_max(&frontier, |a, b| key(a).total_cmp(&key(b)))
            } else {
                pick_max(&frontier, |a, b| {
                    model.readout_error(b).total_cmp(&model.readout_error(a))
                })
            };
            self.place(next, target);
        }
        Ok(self.phys.into_iter().map(|p| p.expect("all placed")).collect())
    }

    /// Heaviest connection into the placed set; otherwise the unplaced qubit
    /// of largest degree weight.
    fn next_program_qubit(&self) -> Option<usize> {
        let unplaced: Vec<usize> = (0..self.phys.len())
            .filter(|&p| self.phys[p].is_none())
            .collect();
        let first = *unplaced.first()?;
        let conn = |u: usize| -> u64 {
            self.g
                .neighbors(u)
                .filter(|(p, _)| self.phys[*p].is_some())
                .map(|(_, w)| w as u64)
                .sum()
        };
        let best = unplaced
            .iter()
            .copied()
            .fold(first, |acc, u| if conn(u) > conn(acc) { u } else { acc });
        if conn(best) > 0 {
            return Some(best);
        }
        Some(unplaced.iter().copied().fold(first, |acc, u| {
            if self.g.degree_weight(u) > self.g.degree_weight(acc) {
                u
            } else {
                acc
            }
        }))
    }
}

/// Maximum under `cmp`, earliest element on ties.
fn pick_max<F>(items: &[usize], cmp: F) -> usize
where
    F: Fn(usize, usize) -> std::cmp::Ordering,
{
    let mut best = items[0];
    for &c in &items[1..] {
        if cmp(c, best) == std::cmp::Ordering::Greater {
            best = c;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    /// Index into the input queue.
    pub circuit: usize,
    pub name: String,
    pub layout: LayoutMap,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub members: Vec<Placement>,
}

impl Round {
    pub fn used_qubits(&self) -> usize {
        self.members.iter().map(|m| m.layout.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leftover {
    pub circuit: usize,
    pub name: String,
    pub reason: String,
}

/// Ordered rounds of concurrently executed circuits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchPlan {
    pub device: String,
    pub buffer: usize,
    pub fit: FitRule,
    pub rounds: Vec<Round>,
    pub leftover: Vec<Leftover>,
}

impl BatchPlan {
    pub fn placed_count(&self) -> usize {
        self.rounds.iter().map(|r| r.members.len()).sum()
    }

    /// Checks buffer separation, injectivity, disjointness, coverage and that
    /// every layout stays within the device.
    pub fn verify(&self, queue: &[CircuitIR], h: &HardwareModel) -> Result<(), String> {
        let mut seen = vec![0usize; queue.len()];
        for (ri, round) in self.rounds.iter().enumerate() {
            if round.members.is_empty() {
                return Err(format!("round {ri} is empty"));
            }
            let mut used = BTreeSet::new();
            for m in &round.members {
                seen[m.circuit] += 1;
                if m.layout.len() != queue[m.circuit].n_qubits {
                    return Err(format!("round {ri}: layout of {} is not total", m.name));
                }
                for &q in m.layout.as_slice() {
                    if q >= h.n_qubits() {
                        return Err(format!("round {ri}: qubit {q} outside device"));
                    }
                    if !used.insert(q) {
                        return Err(format!("round {ri}: physical qubit {q} used twice"));
                    }
                }
            }
            for (i, a) in round.members.iter().enumerate() {
                for b in &round.members[i + 1..] {
                    let d = h.set_distance(a.layout.as_slice(), b.layout.as_slice());
                    if let Some(d) = d {
                        if d <= self.buffer {
                            return Err(format!(
                                "round {ri}: {} and {} are {d} hops apart",
                                a.name, b.name
                            ));
                        }
                    }
                }
            }
        }
        for l in &self.leftover {
            seen[l.circuit] += 1;
        }
        if let Some(i) = seen.iter().position(|&c| c != 1) {
            return Err(format!("circuit {i} appears {} times", seen[i]));
        }
        Ok(())
    }
}

/// Smallest hop distance between members of different circuits in a round.
pub fn min_separation(round: &Round, h: &HardwareModel) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, a) in round.members.iter().enumerate() {
        for b in &round.members[i + 1..] {
            if let Some(d) = h.set_distance(a.layout.as_slice(), b.layout.as_slice()) {
                best = Some(best.map_or(d, |x| x.min(d)));
            }
        }
    }
    best
}

/// Queue order used by the layout: descending cx depth, stable.
pub fn queue_order(queue: &[CircuitIR]) -> Vec<usize> {
    let depths: Vec<usize> = queue.iter().map(|c| c.cx_depth()).collect();
    let mut order: Vec<usize> = (0..queue.len()).collect();
    order.sort_by(|&a, &b| depths[b].cmp(&depths[a]));
    order
}

pub fn physical_distance_layout(
    queue: &[CircuitIR],
    h: &HardwareModel,
    opts: &LayoutOptions,
) -> BatchPlan {
    let r = h.reliability_graph();
    let graphs: Vec<InteractionGraph> = queue.iter().map(|c| c.interaction_graph()).collect();
    let mut pending: VecDeque<usize> = queue_order(queue).into();
    let mut plan = BatchPlan {
        device: h.name().to_string(),
        buffer: opts.buffer,
        fit: opts.fit,
        rounds: Vec::new(),
        leftover: Vec::new(),
    };
    let mut state = HardwareState::fresh(h);
    let mut draft = Round::default();
    while let Some(i) = pending.pop_front() {
        let c = &queue[i];
        if c.n_qubits > h.n_qubits() {
            plan.leftover.push(Leftover {
                circuit: i,
                name: c.name.clone(),
                reason: format!(
                    "needs {} qubits, device has {}",
                    c.n_qubits,
                    h.n_qubits()
                ),
            });
            continue;
        }
        if opts.fit.admits(state.largest_component_size(), c.n_qubits) {
            if let Ok(layout) = allocate_one_with(&graphs[i], &state, &r, opts.fit) {
                state.remove_with_buffer(&layout.image(), opts.buffer);
                draft.members.push(Placement {
                    circuit: i,
                    name: c.name.clone(),
                    layout,
                });
                continue;
            }
        }
        if draft.members.is_empty() {
            plan.leftover.push(Leftover {
                circuit: i,
                name: c.name.clone(),
                reason: "does not fit an empty device".to_string(),
            });
            continue;
        }
        pending.push_front(i);
        plan.rounds.push(std::mem::take(&mut draft));
        state = HardwareState::fresh(h);
    }
    if !draft.members.is_empty() {
        plan.rounds.push(draft);
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateOp;
    use crate::hardware::{line, presets, Durations};
    use std::collections::BTreeMap;

    fn chain(name: &str, n: usize, reps: usize) -> CircuitIR {
        let mut c = CircuitIR::new(name, n, 0);
        for _ in 0..reps {
            for q in 1..n {
                c.push(GateOp::cx(q - 1, q));
            }
        }
        c
    }

    #[test]
    fn two_qubit_circuit_takes_the_better_edge() {
        let m = line(3, &[0.01, 0.05]);
        let g = chain("c", 2, 1).interaction_graph();
        let s = HardwareState::fresh(&m);
        let map = allocate_one(&g, &s, &m.reliability_graph()).unwrap();
        assert_eq!(map.image(), vec![0, 1]);
    }

    #[test]
    fn single_qubit_goes_to_better_endpoint() {
        let coupling = [(0, 1), (1, 2)];
        let errs = BTreeMap::from([((0, 1), 0.05), ((1, 2), 0.01)]);
        let m = HardwareModel::new(
            "l3",
            3,
            &coupling,
            &errs,
            None,
            Some(vec![0.01, 0.03, 0.02]),
            Durations::default(),
        )
        .unwrap();
        let g = CircuitIR::new("one", 1, 0).interaction_graph();
        let map = allocate_one(&g, &HardwareState::fresh(&m), &m.reliability_graph()).unwrap();
        assert_eq!(map.as_slice(), &[2]);
    }

    #[test]
    fn strict_rule_rejects_exact_fit() {
        let m = line(3, &[0.01; 2]);
        let g = chain("c", 3, 1).interaction_graph();
        let s = HardwareState::fresh(&m);
        let r = m.reliability_graph();
        assert_eq!(allocate_one_with(&g, &s, &r, FitRule::Strict), Err(NoRoom));
        assert!(allocate_one_with(&g, &s, &r, FitRule::AllowExact).is_ok());
    }

    #[test]
    fn disconnected_program_is_placed_contiguously() {
        let m = line(6, &[0.01; 5]);
        let mut c = CircuitIR::new("split", 4, 0);
        c.push(GateOp::cx(0, 1)).push(GateOp::cx(2, 3));
        let map = allocate_one(&c.interaction_graph(), &HardwareState::fresh(&m), &m.reliability_graph())
            .unwrap();
        assert!(map.is_injective());
        assert_eq!(map.len(), 4);
        assert!(m.is_coupled(map.get(0), map.get(1)));
        assert!(m.is_coupled(map.get(2), map.get(3)));
    }

    #[test]
    fn empty_queue_gives_empty_plan() {
        let m = presets::falcon27();
        let plan = physical_distance_layout(&[], &m, &LayoutOptions::default());
        assert!(plan.rounds.is_empty() && plan.leftover.is_empty());
    }

    #[test]
    fn five_small_circuits_share_one_round_at_zero_buffer() {
        let m = presets::falcon27();
        let queue: Vec<CircuitIR> = (0..5).map(|i| chain(&format!("c{i}"), 3, 2)).collect();
        let plan = physical_distance_layout(&queue, &m, &LayoutOptions::with_buffer(0));
        assert_eq!(plan.rounds.len(), 1);
        assert_eq!(plan.rounds[0].members.len(), 5);
        plan.verify(&queue, &m).unwrap();
    }

    #[test]
    fn large_circuits_get_their_own_rounds() {
        let m = presets::falcon27();
        let queue = [chain("a", 26, 1), chain("b", 26, 1)];
        // 26-qubit lines do not embed in heavy-hex; use edgeless circuits
        let queue: Vec<CircuitIR> = queue
            .iter()
            .map(|c| CircuitIR::new(c.name.clone(), c.n_qubits, 0))
            .collect();
        let plan = physical_distance_layout(&queue, &m, &LayoutOptions::default());
        assert_eq!(plan.rounds.len(), 2);
        assert!(plan.rounds.iter().all(|r| r.members.len() == 1));
        plan.verify(&queue, &m).unwrap();
    }

    #[test]
    fn oversized_circuit_is_left_over() {
        let m = line(4, &[0.01; 3]);
        let queue = vec![chain("big", 6, 1), chain("ok", 2, 1), chain("tight", 4, 1)];
        let plan = physical_distance_layout(&queue, &m, &LayoutOptions::default());
        let names: Vec<&str> = plan.leftover.iter().map(|l| l.name.as_str()).collect();
        assert_eq!(names, vec!["big", "tight"]);
        assert_eq!(plan.placed_count(), 1);
        plan.verify(&queue, &m).unwrap();
    }

    #[test]
    fn queue_is_sorted_by_descending_cx_depth() {
        let queue = vec![chain("a", 2, 1), chain("b", 2, 5), chain("c", 2, 1), chain("d", 2, 3)];
        assert_eq!(queue_order(&queue), vec![1, 3, 0, 2]);
    }

    #[test]
    fn buffer_separates_circuits() {
        let m = presets::falcon27();
        let queue: Vec<CircuitIR> = (0..5).map(|i| chain(&format!("t{i}"), 3, 3)).collect();
        for d in 0..3 {
            let plan = physical_distance_layout(&queue, &m, &LayoutOptions::with_buffer(d));
            plan.verify(&queue, &m).unwrap();
            for round in &plan.rounds {
                if let Some(sep) = min_separation(round, &m) {
                    assert!(sep > d);
                }
            }
        }
    }
}
