use std::collections::VecDeque;

use super::{CircuitIR, GateKind, GateOp};

/// Dependency DAG of a circuit. Node `i` is gate `i`; an edge `a -> b` means
/// `b` is the next gate after `a` on at least one shared qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitDag {
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
}

impl CircuitDag {
    pub fn build(c: &CircuitIR) -> CircuitDag {
        let n = c.gates.len();
        let mut successors = vec![Vec::new(); n];
        let mut predecessors = vec![Vec::new(); n];
        let mut last: Vec<Option<usize>> = vec![None; c.n_qubits];
        for (i, g) in c.gates.iter().enumerate() {
            for &q in &g.qubits {
                if let Some(p) = last[q] {
                    if !successors[p].contains(&i) {
                        successors[p].push(i);
                        predecessors[i].push(p);
                    }
                }
                last[q] = Some(i);
            }
        }
        CircuitDag {
            successors,
            predecessors,
        }
    }

    pub fn len(&self) -> usize {
        self.successors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successors.is_empty()
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.successors[node]
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.predecessors[node]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// Kahn's algorithm; `None` if a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.predecessors.iter().map(Vec::len).collect();
        let mut ready: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_front() {
            order.push(v);
            for &s in &self.successors[v] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.push_back(s);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Maximum total node weight over all paths. Gate indices are already a
    /// topological order, so a single forward pass suffices.
    pub fn longest_path<F>(&self, weight: F) -> u64
    where
        F: Fn(usize) -> u64,
    {
        let mut best = vec![0u64; self.len()];
        let mut overall = 0;
        for v in 0..self.len() {
            let incoming = self.predecessors[v]
                .iter()
                .map(|&p| best[p])
                .max()
                .unwrap_or(0);
            best[v] = incoming + weight(v);
            overall = overall.max(best[v]);
        }
        overall
    }
}

/// Length of the longest dependency path counting only `cx` gates.
pub fn cx_depth(c: &CircuitIR) -> usize {
    let mut depth = vec![0usize; c.n_qubits];
    let mut overall = 0;
    for g in &c.gates {
        let here = g.qubits.iter().map(|&q| depth[q]).max().unwrap_or(0) + usize::from(g.is_cx());
        for &q in &g.qubits {
            depth[q] = here;
        }
        overall = overall.max(here);
    }
    overall
}

/// Longest dependency path counting every operation except barriers.
pub fn depth(c: &CircuitIR) -> usize {
    let dag = CircuitDag::build(c);
    dag.longest_path(|i| u64::from(!is_barrier(&c.gates[i]))) as usize
}

fn is_barrier(g: &GateOp) -> bool {
    g.kind == GateKind::Barrier
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{GateKind, GateOp};

    #[test]
    fn dependent_pair_has_one_edge() {
        let mut c = CircuitIR::new("c", 2, 0);
        c.push(GateOp::single(GateKind::H, 0)).push(GateOp::cx(0, 1));
        let dag = CircuitDag::build(&c);
        assert_eq!(dag.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn parallel_gates_have_no_edges() {
        let mut c = CircuitIR::new("c", 2, 0);
        c.push(GateOp::single(GateKind::X, 0))
            .push(GateOp::single(GateKind::X, 1));
        let dag = CircuitDag::build(&c);
        assert_eq!(dag.edge_count(), 0);
        assert_eq!(dag.topological_order(), Some(vec![0, 1]));
    }

    #[test]
    fn barrier_orders_but_does_not_count() {
        let mut c = CircuitIR::new("c", 2, 0);
        c.push(GateOp::cx(0, 1))
            .push(GateOp::barrier(vec![0, 1]))
            .push(GateOp::cx(1, 0));
        let dag = CircuitDag::build(&c);
        assert_eq!(dag.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(cx_depth(&c), 2);
        assert_eq!(depth(&c), 2);
    }

    #[test]
    fn no_cx_gives_zero_depth() {
        let mut c = CircuitIR::new("c", 3, 0);
        for q in 0..3 {
            c.push(GateOp::single(GateKind::H, q));
        }
        assert_eq!(cx_depth(&c), 0);
    }

    #[test]
    fn cx_on_disjoint_pairs_run_in_parallel() {
        let mut c = CircuitIR::new("c", 4, 0);
        c.push(GateOp::cx(0, 1))
            .push(GateOp::cx(2, 3))
            .push(GateOp::cx(1, 2));
        assert_eq!(cx_depth(&c), 2);
    }
}
