#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use quilt::circuit::{CircuitIR, GateKind, GateOp};
use quilt::hardware::{Durations, HardwareModel};

/// Connected device: random spanning tree plus extra edges.
pub fn device(max_qubits: usize) -> impl Strategy<Value = HardwareModel> {
    (2usize..=max_qubits).prop_flat_map(|n| {
        let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|i| (0..i).boxed()).collect();
        let extra = prop::collection::vec((0..n, 0..n), 0..n);
        let errs = prop::collection::vec(0.001f64..0.2, n * n);
        (parents, extra, errs).prop_map(move |(parents, extra, errs)| {
            let mut edges: Vec<(usize, usize)> =
                parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
            for (a, b) in extra {
                let e = (a.min(b), a.max(b));
                if a != b && !edges.contains(&e) {
                    edges.push(e);
                }
            }
            let cx: BTreeMap<(usize, usize), f64> = edges
                .iter()
                .enumerate()
                .map(|(i, &e)| (e, errs[i]))
                .collect();
            HardwareModel::new("rand", n, &edges, &cx, None, None, Durations::default())
                .expect("valid random device")
        })
    })
}

/// Circuit of `n` qubits; `connected` forces a connected interaction graph.
pub fn circuit(max_qubits: usize, connected: bool) -> impl Strategy<Value = CircuitIR> {
    (1usize..=max_qubits).prop_flat_map(move |n| {
        let pairs = prop::collection::vec((0..n, 0..n), 0..12);
        let tree: Vec<BoxedStrategy<usize>> = (1..n).map(|i| (0..i).boxed()).collect();
        (Just(n), pairs, tree).prop_map(move |(n, pairs, tree)| {
            let mut c = CircuitIR::new("c", n, n);
            if connected {
                for (i, &p) in tree.iter().enumerate() {
                    c.push(GateOp::cx(p, i + 1));
                }
            }
            for (a, b) in pairs {
                if a != b {
                    c.push(GateOp::cx(a, b));
                } else {
                    c.push(GateOp::single(GateKind::H, a));
                }
            }
            for q in 0..n {
                c.push(GateOp::measure(q, q));
            }
            c
        })
    })
}

/// Product of `(1 - e)^count` over cx pairs under an explicit mapping;
/// zero when a pair lands on uncoupled qubits.
pub fn reliability_product(c: &CircuitIR, h: &HardwareModel, phys: &[usize]) -> f64 {
    let mut weights: BTreeMap<(usize, usize), i32> = BTreeMap::new();
    for g in c.gates.iter().filter(|g| g.kind == GateKind::Cx) {
        let (a, b) = (g.qubits[0], g.qubits[1]);
        *weights.entry((a.min(b), a.max(b))).or_default() += 1;
    }
    weights
        .iter()
        .map(|(&(a, b), &w)| match h.cx_error(phys[a], phys[b]) {
            Some(e) => (1.0 - e).powi(w),
            None => 0.0,
        })
        .product()
}

/// Best reliability product over every injective placement.
pub fn brute_force_best(c: &CircuitIR, h: &HardwareModel) -> f64 {
    fn go(c: &CircuitIR, h: &HardwareModel, phys: &mut Vec<usize>, used: &mut [bool], best: &mut f64) {
        if phys.len() == c.n_qubits {
            *best = best.max(reliability_product(c, h, phys));
            return;
        }
        for q in 0..h.n_qubits() {
            if !used[q] {
                used[q] = true;
                phys.push(q);
                go(c, h, phys, used, best);
                phys.pop();
                used[q] = false;
            }
        }
    }
    let mut best = 0.0;
    go(c, h, &mut Vec::new(), &mut vec![false; h.n_qubits()], &mut best);
    best
}

/// Hop distances by BFS, independent of the device's own tables.
pub fn bfs_distances(h: &HardwareModel, from: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; h.n_qubits()];
    dist[from] = Some(0);
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &(a, b) in h.edges() {
            let v = if a == u { b } else if b == u { a } else { continue };
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}
