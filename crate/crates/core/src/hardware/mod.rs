//! Device topology and calibration.
//!
//! A [`HardwareModel`] is immutable once loaded. Allocation bookkeeping lives
//! in [`HardwareState`], a cheap value that tracks which physical qubits are
//! still free during one compilation.

mod calibration;
pub mod presets;
mod state;

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

pub use calibration::{load_calibration, CalibrationDoc, DurationsDoc};
pub use state::HardwareState;

/// Gate and measurement durations in device time units (dt).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Durations {
    pub single_qubit: u64,
    pub cx: u64,
    pub measure: u64,
}

impl Default for Durations {
    fn default() -> Durations {
        Durations {
            single_qubit: 36,
            cx: 160,
            measure: 1200,
        }
    }
}

#[derive(Debug, Error)]
pub enum HardwareError {
    #[error("calibration document is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("calibration document has no coupling list")]
    MissingCoupling,
    #[error("device must have at least one qubit")]
    NoQubits,
    #[error("{what} = {value} is outside [0, 1]")]
    OutOfRange { what: String, value: f64 },
    #[error("{what} refers to qubit {qubit}, but the device has {n_qubits} qubits")]
    DanglingQubit {
        what: String,
        qubit: usize,
        n_qubits: usize,
    },
    #[error("coupling edge {0}-{0} is a self-loop")]
    SelfLoop(usize),
    #[error("coupling edge {0}-{1} has no cx_error entry")]
    MissingCxError(usize, usize),
    #[error("cx_error key '{0}' is not of the form \"a-b\"")]
    BadEdgeKey(String),
    #[error("cx_error given for {0}-{1}, which is not a coupling edge")]
    UnknownEdge(usize, usize),
    #[error("{what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("duration '{0}' must be positive")]
    ZeroDuration(&'static str),
    #[error("unknown device preset '{0}'")]
    UnknownPreset(String),
}

/// Reliability-weighted coupling graph: each edge carries `r = 1 - eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityGraph {
    n_qubits: usize,
    edges: BTreeMap<(usize, usize), f64>,
}

impl ReliabilityGraph {
    pub fn reliability(&self, a: usize, b: usize) -> Option<f64> {
        self.edges.get(&ordered(a, b)).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.edges.iter().map(|(&e, &r)| (e, r))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Maps every edge back to its error rate `1 - r`.
    pub fn error_map(&self) -> BTreeMap<(usize, usize), f64> {
        self.edges.iter().map(|(&e, &r)| (e, 1.0 - r)).collect()
    }
}

/// Device topology with calibration data.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareModel {
    name: String,
    n_qubits: usize,
    edges: Vec<(usize, usize)>,
    cx_error: Vec<f64>,
    sq_error: Vec<f64>,
    readout_error: Vec<f64>,
    durations: Durations,
    adjacency: Vec<Vec<usize>>,
    distances: Vec<Vec<u32>>,
}

const UNREACHABLE: u32 = u32::MAX;

pub(crate) fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn check_unit(what: impl Into<String>, value: f64) -> Result<(), HardwareError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(HardwareError::OutOfRange {
            what: what.into(),
            value,
        })
    }
}

impl HardwareModel {
    /// Validates and builds a model. `cx_error` must cover every edge.
    pub fn new(
        name: impl Into<String>,
        n_qubits: usize,
        coupling: &[(usize, usize)],
        cx_error: &BTreeMap<(usize, usize), f64>,
        sq_error: Option<Vec<f64>>,
        readout_error: Option<Vec<f64>>,
        durations: Durations,
    ) -> Result<HardwareModel, HardwareError> {
        if n_qubits == 0 {
            return Err(HardwareError::NoQubits);
        }
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(coupling.len());
        for &(a, b) in coupling {
            for q in [a, b] {
                if q >= n_qubits {
                    return Err(HardwareError::DanglingQubit {
                        what: format!("coupling edge {a}-{b}"),
                        qubit: q,
                        n_qubits,
                    });
                }
            }
            if a == b {
                return Err(HardwareError::SelfLoop(a));
            }
            edges.push(ordered(a, b));
        }
        edges.sort_unstable();
        edges.dedup();
        for (&(a, b), &e) in cx_error {
            if !edges.contains(&ordered(a, b)) {
                for q in [a, b] {
                    if q >= n_qubits {
                        return Err(HardwareError::DanglingQubit {
                            what: format!("cx_error {a}-{b}"),
                            qubit: q,
                            n_qubits,
                        });
                    }
                }
                return Err(HardwareError::UnknownEdge(a, b));
            }
            check_unit(format!("cx_error {a}-{b}"), e)?;
        }
        let normalized: BTreeMap<(usize, usize), f64> =
            cx_error.iter().map(|(&(a, b), &e)| (ordered(a, b), e)).collect();
        let cx: Vec<f64> = edges
            .iter()
            .map(|&(a, b)| {
                normalized
                    .get(&(a, b))
                    .copied()
                    .ok_or(HardwareError::MissingCxError(a, b))
            })
            .collect::<Result<_, _>>()?;
        let per_qubit = |v: Option<Vec<f64>>, what: &'static str| -> Result<Vec<f64>, HardwareError> {
            match v {
                None => Ok(vec![0.0; n_qubits]),
                Some(v) => {
                    if v.len() != n_qubits {
                        return Err(HardwareError::LengthMismatch {
                            what,
                            got: v.len(),
                            expected: n_qubits,
                        });
                    }
                    for (q, &x) in v.iter().enumerate() {
                        check_unit(format!("{what}[{q}]"), x)?;
                    }
                    Ok(v)
                }
            }
        };
        let sq_error = per_qubit(sq_error, "sq_error")?;
        let readout_error = per_qubit(readout_error, "readout_error")?;
        for (what, v) in [
            ("1q_gate_dt", durations.single_qubit),
            ("cx_dt", durations.cx),
            ("measure_dt", durations.measure),
        ] {
            if v == 0 {
                return Err(HardwareError::ZeroDuration(what));
            }
        }
        let mut adjacency = vec![Vec::new(); n_qubits];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let distances = (0..n_qubits).map(|s| bfs(&adjacency, s)).collect();
        Ok(HardwareModel {
            name: name.into(),
            n_qubits,
            edges,
            cx_error: cx,
            sq_error,
            readout_error,
            durations,
            adjacency,
            distances,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Coupling edges as sorted `(low, high)` pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn is_coupled(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&ordered(a, b)).is_ok()
    }

    pub fn cx_error(&self, a: usize, b: usize) -> Option<f64> {
        self.edges
            .binary_search(&ordered(a, b))
            .ok()
            .map(|i| self.cx_error[i])
    }

    pub fn cx_errors(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.edges.iter().copied().zip(self.cx_error.iter().copied())
    }

    pub fn sq_error(&self, q: usize) -> f64 {
        self.sq_error[q]
    }

    pub fn readout_error(&self, q: usize) -> f64 {
        self.readout_error[q]
    }

    pub fn durations(&self) -> Durations {
        self.durations
    }

    /// Shortest-path edge count; `None` when unreachable.
    pub fn hop_distance(&self, a: usize, b: usize) -> Option<usize> {
        match self.distances[a][b] {
            UNREACHABLE => None,
            d => Some(d as usize),
        }
    }

    /// Smallest hop distance between any qubit of `a` and any qubit of `b`.
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> Option<usize> {
        a.iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .filter_map(|(x, y)| self.hop_distance(x, y))
            .min()
    }

    /// Largest finite hop distance.
    pub fn diameter(&self) -> usize {
        self.distances
            .iter()
            .flatten()
            .filter(|&&d| d != UNREACHABLE)
            .max()
            .copied()
            .unwrap_or(0) as usize
    }

    /// One shortest path from `a` to `b`, endpoints included.
    pub fn shortest_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        self.hop_distance(a, b)?;
        let mut path = vec![a];
        let mut cur = a;
        while cur != b {
            cur = *self.adjacency[cur]
                .iter()
                .find(|&&n| self.distances[n][b] + 1 == self.distances[cur][b])
                .expect("distance table is consistent");
            path.push(cur);
        }
        Some(path)
    }

    pub fn reliability_graph(&self) -> ReliabilityGraph {
        ReliabilityGraph {
            n_qubits: self.n_qubits,
            edges: self.cx_errors().map(|(e, eps)| (e, 1.0 - eps)).collect(),
        }
    }

    /// Same topology with every error overridden.
    pub fn with_errors(&self, cx: f64, sq: f64, readout: f64) -> HardwareModel {
        let mut m = self.clone();
        m.cx_error.iter_mut().for_each(|e| *e = cx);
        m.sq_error.iter_mut().for_each(|e| *e = sq);
        m.readout_error.iter_mut().for_each(|e| *e = readout);
        m
    }

    /// Same topology and timing, all error rates zero.
    pub fn noiseless(&self) -> HardwareModel {
        self.with_errors(0.0, 0.0, 0.0)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> HardwareModel {
        self.name = name.into();
        self
    }

    pub fn to_document(&self) -> CalibrationDoc {
        CalibrationDoc::from_model(self)
    }
}

fn bfs(adjacency: &[Vec<usize>], source: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; adjacency.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &n in &adjacency[v] {
            if dist[n] == UNREACHABLE {
                dist[n] = dist[v] + 1;
                queue.push_back(n);
            }
        }
    }
    dist
}

/// Line device `0 - 1 - ... - (n-1)` with the given per-edge errors.
pub fn line(n: usize, cx_errors: &[f64]) -> HardwareModel {
    assert_eq!(cx_errors.len(), n.saturating_sub(1));
    let coupling: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    let errs = coupling.iter().copied().zip(cx_errors.iter().copied()).collect();
    HardwareModel::new(
        format!("line{n}"),
        n,
        &coupling,
        &errs,
        None,
        None,
        Durations::default(),
    )
    .expect("line device is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reliability_is_one_minus_error() {
        let m = line(3, &[0.0, 0.02]);
        let r = m.reliability_graph();
        assert_eq!(r.reliability(0, 1), Some(1.0));
        assert_eq!(r.reliability(2, 1), Some(1.0 - 0.02));
        assert_eq!(r.reliability(0, 2), None);
    }

    #[test]
    fn hop_distances_on_a_line() {
        let m = line(5, &[0.01; 4]);
        assert_eq!(m.hop_distance(2, 2), Some(0));
        assert_eq!(m.hop_distance(1, 2), Some(1));
        assert_eq!(m.hop_distance(0, 4), Some(4));
        assert_eq!(m.diameter(), 4);
        assert_eq!(m.shortest_path(0, 3), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn unreachable_is_none() {
        let coupling = [(0, 1)];
        let errs = BTreeMap::from([((0, 1), 0.01)]);
        let m = HardwareModel::new("split", 3, &coupling, &errs, None, None, Durations::default())
            .unwrap();
        assert_eq!(m.hop_distance(0, 2), None);
        assert_eq!(m.shortest_path(0, 2), None);
    }

    #[test]
    fn rejects_invalid_models() {
        let errs = BTreeMap::from([((0, 1), 1.5)]);
        assert!(matches!(
            HardwareModel::new("x", 2, &[(0, 1)], &errs, None, None, Durations::default()),
            Err(HardwareError::OutOfRange { .. })
        ));
        let errs = BTreeMap::new();
        assert!(matches!(
            HardwareModel::new("x", 2, &[(0, 1)], &errs, None, None, Durations::default()),
            Err(HardwareError::MissingCxError(0, 1))
        ));
        let errs = BTreeMap::from([((0, 3), 0.1)]);
        assert!(matches!(
            HardwareModel::new("x", 2, &[(0, 3)], &errs, None, None, Durations::default()),
            Err(HardwareError::DanglingQubit { qubit: 3, .. })
        ));
        let errs = BTreeMap::from([((1, 1), 0.1)]);
        assert!(matches!(
            HardwareModel::new("x", 2, &[(1, 1)], &errs, None, None, Durations::default()),
            Err(HardwareError::SelfLoop(1))
        ));
    }
}
