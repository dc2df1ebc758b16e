use std::collections::BTreeMap;

use super::CircuitIR;

/// Weighted interaction graph of a circuit: program qubits as nodes, an
/// undirected edge per interacting pair, weighted by its cx count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    n_nodes: usize,
    weights: BTreeMap<(usize, usize), u32>,
}

impl InteractionGraph {
    pub fn new(n_nodes: usize) -> InteractionGraph {
        InteractionGraph {
            n_nodes,
            weights: BTreeMap::new(),
        }
    }

    /// Adds `w` to the weight of the unordered pair `{a, b}`.
    pub fn add(&mut self, a: usize, b: usize, w: u32) {
        assert!(a != b, "self-loop on program qubit {a}");
        assert!(a < self.n_nodes && b < self.n_nodes);
        *self.weights.entry(ordered(a, b)).or_insert(0) += w;
    }

    pub fn node_count(&self) -> usize {
        self.n_nodes
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, a: usize, b: usize) -> u32 {
        self.weights.get(&ordered(a, b)).copied().unwrap_or(0)
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.values().map(|&w| u64::from(w)).sum()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        self.weights.iter().map(|(&e, &w)| (e, w))
    }

    pub fn neighbors(&self, q: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.weights.iter().filter_map(move |(&(a, b), &w)| {
            if a == q {
                Some((b, w))
            } else if b == q {
                Some((a, w))
            } else {
                None
            }
        })
    }

    /// Heaviest edge; ties go to the lexicographically smallest pair.
    pub fn heaviest_edge(&self) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), u32)> = None;
        for (e, w) in self.edges() {
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((e, w));
            }
        }
        best.map(|(e, _)| e)
    }

    /// Sum of incident edge weights.
    pub fn degree_weight(&self, q: usize) -> u64 {
        self.neighbors(q).map(|(_, w)| u64::from(w)).sum()
    }

    pub fn is_connected(&self) -> bool {
        if self.n_nodes <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n_nodes];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (u, _) in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn interaction_graph(c: &CircuitIR) -> InteractionGraph {
    let mut g = InteractionGraph::new(c.n_qubits);
    for gate in c.gates.iter().filter(|g| g.is_cx()) {
        g.add(gate.qubits[0], gate.qubits[1], 1);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{GateKind, GateOp};

    #[test]
    fn single_qubit_only_is_edgeless() {
        let mut c = CircuitIR::new("c", 3, 0);
        c.push(GateOp::single(GateKind::H, 0))
            .push(GateOp::single(GateKind::T, 2));
        let g = interaction_graph(&c);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.heaviest_edge(), None);
    }

    #[test]
    fn weights_count_cx_per_pair() {
        let mut c = CircuitIR::new("c", 3, 0);
        c.push(GateOp::cx(0, 1))
            .push(GateOp::cx(0, 1))
            .push(GateOp::cx(1, 2));
        let g = interaction_graph(&c);
        assert_eq!(g.weight(0, 1), 2);
        assert_eq!(g.weight(1, 0), 2);
        assert_eq!(g.weight(1, 2), 1);
        assert_eq!(g.total_weight(), 3);
        assert_eq!(g.heaviest_edge(), Some((0, 1)));
    }

    #[test]
    fn direction_is_ignored() {
        let mut c = CircuitIR::new("c", 2, 0);
        c.push(GateOp::cx(1, 0)).push(GateOp::cx(0, 1));
        assert_eq!(interaction_graph(&c).weight(0, 1), 2);
    }

    #[test]
    fn heaviest_tie_breaks_lexicographically() {
        let mut g = InteractionGraph::new(4);
        g.add(2, 3, 2);
        g.add(0, 3, 2);
        g.add(1, 2, 1);
        assert_eq!(g.heaviest_edge(), Some((0, 3)));
        assert!(g.is_connected());
    }
}
