//! Randomized benchmarking sequences and their isolated or simultaneous
//! execution on the simulator.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::clifford::{cx_count_distribution, random_clifford, synthesize_inverse, Tableau};
use super::fit::{fit_decay, DecayFit};
use crate::circuit::{CircuitIR, GateOp};
use crate::compose::{compose_aligned, ComposeError};
use crate::hardware::HardwareModel;
use crate::layout::LayoutMap;
use crate::sim::{shot_rng, simulate_round, NoiseModel, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbConfig {
    pub lengths: Vec<usize>,
    pub samples: usize,
    pub shots: u64,
    pub seed: u64,
}

impl Default for RbConfig {
    fn default() -> RbConfig {
        RbConfig {
            lengths: vec![1, 2, 4, 8, 16, 32, 64],
            samples: 10,
            shots: 1024,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RbError {
    #[error("need at least 3 distinct sequence lengths, got {0}")]
    TooFewLengths(usize),
    #[error("sequence length must be at least 1")]
    ZeroLength,
    #[error("samples per length must be at least 1")]
    NoSamples,
    #[error("no targets given")]
    NoTargets,
    #[error("target {0:?} must name one qubit or one coupled pair")]
    BadTarget(Vec<usize>),
    #[error("qubit {qubit} appears in more than one target")]
    Overlap { qubit: usize },
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl RbConfig {
    pub fn validate(&self) -> Result<(), RbError> {
        if self.lengths.contains(&0) {
            return Err(RbError::ZeroLength);
        }
        let mut distinct = self.lengths.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 3 {
            return Err(RbError::TooFewLengths(distinct.len()));
        }
        if self.samples == 0 {
            return Err(RbError::NoSamples);
        }
        if self.shots == 0 {
            return Err(SimError::ZeroShots.into());
        }
        Ok(())
    }
}

/// `m` random Cliffords, the inverse of their product, then measurement of
/// every qubit. Clifford layers are separated by barriers. The noiseless
/// outcome is all zeros.
pub fn rb_sequence(n: usize, m: usize, rng: &mut ChaCha8Rng) -> CircuitIR {
    let mut c = CircuitIR::new(format!("rb{n}q_m{m}"), n, n);
    let all: Vec<usize> = (0..n).collect();
    let mut total = Tableau::identity(n);
    for _ in 0..m {
        let (t, gates) = random_clifford(n, rng);
        for g in gates {
            c.push(g.to_op());
        }
        c.push(GateOp::barrier(all.clone()));
        total = total.then(&t);
    }
    for g in synthesize_inverse(&total) {
        c.push(g.to_op());
    }
    c.push(GateOp::barrier(all.clone()));
    for q in 0..n {
        c.push(GateOp::measure(q, q));
    }
    c
}

/// Sequence of length `m` from a seed, with its expected outcome.
pub fn gen_rb_circuit(n: usize, m: usize, seed: u64) -> (CircuitIR, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (rb_sequence(n, m, &mut rng), "0".repeat(n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbResult {
    pub target: Vec<usize>,
    pub lengths: Vec<usize>,
    /// `survival[l][s]` for length index `l` and sample `s`.
    pub survival: Vec<Vec<f64>>,
    pub fit: DecayFit,
    /// Error per Clifford, `(2^n - 1) / 2^n * (1 - alpha)`.
    pub epc: f64,
}

impl RbResult {
    pub fn mean_survival(&self) -> Vec<f64> {
        self.survival
            .iter()
            .map(|s| s.iter().sum::<f64>() / s.len() as f64)
            .collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.target.len()
    }

    /// Per-cx Pauli error implied by the fitted decay, ignoring
    /// single-qubit errors. Only for pair targets.
    pub fn cx_error(&self) -> Option<f64> {
        (self.n_qubits() == 2).then(|| cx_error_from_alpha(self.fit.alpha))
    }
}

pub fn epc_from_alpha(n: usize, alpha: f64) -> f64 {
    let d = (1u64 << n) as f64;
    (d - 1.0) / d * (1.0 - alpha)
}

/// Inverts `alpha = E[(1 - 16p/15)^c]` over the sampler's cx-count
/// distribution for two-qubit Cliffords.
pub fn cx_error_from_alpha(alpha: f64) -> f64 {
    let dist = cx_count_distribution(2);
    let f = |p: f64| -> f64 {
        let lam = 1.0 - 16.0 * p / 15.0;
        dist.iter().map(|&(c, w)| w * lam.powi(c as i32)).sum()
    };
    if alpha >= 1.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 15.0 / 16.0);
    if alpha <= f(hi) {
        return hi;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_targets(targets: &[Vec<usize>], h: &HardwareModel) -> Result<(), RbError> {
    if targets.is_empty() {
        return Err(RbError::NoTargets);
    }
    let mut seen = vec![false; h.n_qubits()];
    for t in targets {
        let ok = match t.as_slice() {
            [q] => *q < h.n_qubits(),
            [a, b] => a != b && *a < h.n_qubits() && *b < h.n_qubits() && h.is_coupled(*a, *b),
            _ => false,
        };
        if !ok {
            return Err(RbError::BadTarget(t.clone()));
        }
        for &q in t {
            if std::mem::replace(&mut seen[q], true) {
                return Err(RbError::Overlap { qubit: q });
            }
        }
    }
    Ok(())
}

/// Runs RB on every target. With `simultaneous`, all targets' sequences of
/// the same length and sample run in one aligned round; otherwise each
/// runs alone. Target `i` uses the same sequences in both modes.
pub fn run_rb(
    targets: &[Vec<usize>],
    simultaneous: bool,
    cfg: &RbConfig,
    nm: &NoiseModel,
) -> Result<Vec<RbResult>, RbError> {
    cfg.validate()?;
    let h = nm.device();
    check_targets(targets, h)?;
    let mut survival = vec![vec![Vec::with_capacity(cfg.samples); cfg.lengths.len()]; targets.len()];
    for (li, &m) in cfg.lengths.iter().enumerate() {
        for s in 0..cfg.samples {
            let tag = ((li as u64) << 32) | s as u64;
            let members: Vec<(String, usize, CircuitIR, LayoutMap)> = targets
                .iter()
                .enumerate()
                .map(|(ti, t)| {
                    let mut rng = shot_rng(cfg.seed ^ 0x5e_ed0f_c11f, ti as u64, tag);
                    let c = rb_sequence(t.len(), m, &mut rng);
                    (format!("t{ti}"), ti, c, LayoutMap::new(t.clone()))
                })
                .collect();
            let sim_seed = cfg.seed.wrapping_add(tag);
            let batches: Vec<Vec<_>> = if simultaneous {
                vec![members]
            } else {
                members.into_iter().map(|m| vec![m]).collect()
            };
            for batch in batches {
                let cr = compose_aligned(format!("rb_m{m}_s{s}"), batch, h)?;
                let counts = simulate_round(&cr, nm, cfg.shots, sim_seed)?;
                for mc in counts {
                    let n = targets[mc.circuit_index].len();
                    let ok = mc.counts.get(&"0".repeat(n)).copied().unwrap_or(0);
                    survival[mc.circuit_index][li].push(ok as f64 / mc.shots as f64);
                }
            }
        }
    }
    Ok(targets
        .iter()
        .zip(survival)
        .map(|(t, surv)| {
            let means: Vec<f64> = surv
                .iter()
                .map(|s| s.iter().sum::<f64>() / s.len() as f64)
                .collect();
            let fit = fit_decay(&cfg.lengths, &means);
            RbResult {
                target: t.clone(),
                lengths: cfg.lengths.clone(),
                survival: surv,
                epc: epc_from_alpha(t.len(), fit.alpha),
                fit,
            }
        })
        .collect())
}

/// `target,length,sample,survival` rows; the target is written `a-b`.
pub fn survival_csv(results: &[RbResult]) -> String {
    let mut out = String::from("target,length,sample,survival\n");
    for r in results {
        let name: Vec<String> = r.target.iter().map(|q| q.to_string()).collect();
        for (li, samples) in r.survival.iter().enumerate() {
            for (s, v) in samples.iter().enumerate() {
                writeln!(out, "{},{},{},{}", name.join("-"), r.lengths[li], s, v).unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::line;
    use crate::sim::{ideal_outputs, NoiseParams};

    #[test]
    fn sequences_return_to_zero() {
        for n in 1..=2 {
            for m in [1, 3, 10] {
                for seed in 0..5 {
                    let (c, expect) = gen_rb_circuit(n, m, seed);
                    let ideal = ideal_outputs(&c).unwrap();
                    assert!((ideal.probs[&expect] - 1.0).abs() < 1e-9, "n={n} m={m} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = RbConfig {
            lengths: vec![1, 1, 2],
            ..RbConfig::default()
        };
        assert_eq!(cfg.validate(), Err(RbError::TooFewLengths(2)));
        cfg.lengths = vec![0, 1, 2];
        assert_eq!(cfg.validate(), Err(RbError::ZeroLength));
        cfg.lengths = vec![1, 2, 3];
        cfg.samples = 0;
        assert_eq!(cfg.validate(), Err(RbError::NoSamples));
    }

    #[test]
    fn target_checks() {
        let h = line(4, &[0.01; 3]);
        let nm = NoiseModel::noiseless(&h);
        let cfg = RbConfig {
            lengths: vec![1, 2, 4],
            samples: 1,
            shots: 8,
            seed: 0,
        };
        assert_eq!(
            run_rb(&[vec![0, 1], vec![1, 2]], true, &cfg, &nm).unwrap_err(),
            RbError::Overlap { qubit: 1 }
        );
        assert_eq!(
            run_rb(&[vec![0, 2]], true, &cfg, &nm).unwrap_err(),
            RbError::BadTarget(vec![0, 2])
        );
        assert_eq!(run_rb(&[], true, &cfg, &nm).unwrap_err(), RbError::NoTargets);
    }

    #[test]
    fn noiseless_rb_does_not_decay() {
        let h = line(4, &[0.01; 3]);
        let nm = NoiseModel::noiseless(&h);
        let cfg = RbConfig {
            lengths: vec![1, 2, 4, 8],
            samples: 2,
            shots: 64,
            seed: 9,
        };
        for r in run_rb(&[vec![0, 1], vec![3]], true, &cfg, &nm).unwrap() {
            assert!(r.epc.abs() < 1e-3);
            assert!((r.fit.alpha - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn cx_inversion_round_trips() {
        let dist = cx_count_distribution(2);
        for p in [0.0, 0.005, 0.02, 0.05] {
            let lam: f64 = 1.0 - 16.0 * p / 15.0;
            let alpha: f64 = dist.iter().map(|&(c, w)| w * lam.powi(c as i32)).sum();
            assert!((cx_error_from_alpha(alpha) - p).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_shape() {
        let h = line(2, &[0.01]);
        let nm = NoiseModel::new(&h, NoiseParams::default());
        let cfg = RbConfig {
            lengths: vec![1, 2, 4],
            samples: 2,
            shots: 16,
            seed: 1,
        };
        let res = run_rb(&[vec![0, 1]], false, &cfg, &nm).unwrap();
        let csv = survival_csv(&res);
        assert_eq!(csv.lines().count(), 1 + 3 * 2);
        assert!(csv.lines().nth(1).unwrap().starts_with("0-1,1,0,"));
    }
}
