use std::collections::BTreeSet;

use super::HardwareModel;

/// Which physical qubits are still free during one compilation.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareState<'a> {
    model: &'a HardwareModel,
    free: Vec<bool>,
}

impl<'a> HardwareState<'a> {
    /// Every qubit free.
    pub fn fresh(model: &'a HardwareModel) -> HardwareState<'a> {
        HardwareState {
            model,
            free: vec![true; model.n_qubits()],
        }
    }

    pub fn model(&self) -> &'a HardwareModel {
        self.model
    }

    pub fn is_free(&self, q: usize) -> bool {
        self.free[q]
    }

    pub fn free_count(&self) -> usize {
        self.free.iter().filter(|&&f| f).count()
    }

    pub fn free_qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.free
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(q, _)| q)
    }

    /// Marks `qubits` as used without any buffer.
    pub fn occupy(&mut self, qubits: &[usize]) {
        for &q in qubits {
            self.free[q] = false;
        }
    }

    /// Connected components of the free subgraph, each sorted, ordered by
    /// their lowest qubit.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.free.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if !self.free[start] || seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in self.model.neighbors(v) {
                    if self.free[w] && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn largest_component_size(&self) -> usize {
        self.connected_components()
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
    }

    /// Removes `used` plus every qubit within `d` hops of it. Distances are
    /// measured on the full device graph, not on the free subgraph.
    pub fn remove_with_buffer(&mut self, used: &[usize], d: usize) {
        for q in 0..self.free.len() {
            if !self.free[q] {
                continue;
            }
            let near = used
                .iter()
                .any(|&u| self.model.hop_distance(q, u).is_some_and(|h| h <= d));
            if near {
                self.free[q] = false;
            }
        }
    }

    /// Qubits within `d` hops of `used` on the full graph, `used` excluded.
    pub fn buffer_zone(&self, used: &[usize], d: usize) -> BTreeSet<usize> {
        let used_set: BTreeSet<usize> = used.iter().copied().collect();
        (0..self.free.len())
            .filter(|q| !used_set.contains(q))
            .filter(|&q| {
                used.iter()
                    .any(|&u| self.model.hop_distance(q, u).is_some_and(|h| h <= d))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::line;
    use super::*;

    #[test]
    fn buffer_removes_neighbourhood_on_full_graph() {
        let m = line(8, &[0.01; 7]);
        let mut s = HardwareState::fresh(&m);
        s.remove_with_buffer(&[3, 4], 1);
        let free: Vec<usize> = s.free_qubits().collect();
        assert_eq!(free, vec![0, 1, 6, 7]);
        assert_eq!(s.connected_components(), vec![vec![0, 1], vec![6, 7]]);
    }

    #[test]
    fn distance_ignores_already_removed_qubits() {
        // qubit 3 is still 2 hops from 1 even though 2 is already gone
        let m = line(5, &[0.01; 4]);
        let mut s = HardwareState::fresh(&m);
        s.occupy(&[2]);
        s.remove_with_buffer(&[1], 2);
        assert_eq!(s.free_qubits().collect::<Vec<_>>(), vec![4]);
    }

    #[test]
    fn zero_buffer_only_removes_used() {
        let m = line(4, &[0.01; 3]);
        let mut s = HardwareState::fresh(&m);
        s.remove_with_buffer(&[1], 0);
        assert_eq!(s.free_qubits().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(s.largest_component_size(), 2);
    }
}
