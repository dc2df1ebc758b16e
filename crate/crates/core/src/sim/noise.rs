use serde::{Deserialize, Serialize};

use crate::compose::routed_cx_count;
use crate::hardware::HardwareModel;

/// Crosstalk and idle-noise knobs. Error rates themselves come from the
/// device calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Factor applied to a cx error per overlapping nearby cx.
    pub gamma: f64,
    /// Pairs at most this many hops apart couple.
    pub hop_threshold: usize,
    /// Idle depolarizing rate per dt.
    pub idle_rate: f64,
    /// Every error rate forced to zero.
    #[serde(default)]
    pub noiseless: bool,
}

impl Default for NoiseParams {
    fn default() -> NoiseParams {
        NoiseParams {
            gamma: 3.0,
            hop_threshold: 1,
            idle_rate: 0.0,
            noiseless: false,
        }
    }
}

/// Per-gate Pauli error rates for one device plus crosstalk scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub params: NoiseParams,
    device: HardwareModel,
}

impl NoiseModel {
    pub fn new(h: &HardwareModel, params: NoiseParams) -> NoiseModel {
        let device = if params.noiseless {
            h.noiseless()
        } else {
            h.clone()
        };
        NoiseModel { params, device }
    }

    pub fn noiseless(h: &HardwareModel) -> NoiseModel {
        NoiseModel::new(
            h,
            NoiseParams {
                noiseless: true,
                ..NoiseParams::default()
            },
        )
    }

    pub fn device(&self) -> &HardwareModel {
        &self.device
    }

    pub fn sq_error(&self, q: usize) -> f64 {
        self.device.sq_error(q)
    }

    pub fn readout_error(&self, q: usize) -> f64 {
        self.device.readout_error(q)
    }

    /// Base error of a cx between two physical qubits. A non-adjacent pair
    /// is charged as a routed gate along a shortest path, using the mean
    /// error of the path's edges.
    pub fn cx_base_error(&self, a: usize, b: usize) -> f64 {
        if let Some(e) = self.device.cx_error(a, b) {
            return e;
        }
        match self.device.shortest_path(a, b) {
            Some(path) if path.len() > 1 => {
                let errs: Vec<f64> = path
                    .windows(2)
                    .map(|w| self.device.cx_error(w[0], w[1]).unwrap_or(0.0))
                    .collect();
                let mean = errs.iter().sum::<f64>() / errs.len() as f64;
                let n = routed_cx_count(path.len() - 1) as i32;
                1.0 - (1.0 - mean).powi(n)
            }
            _ => 1.0,
        }
    }

    /// Base error scaled by `gamma^k`, clamped to 1.
    pub fn cx_error(&self, a: usize, b: usize, k: usize) -> f64 {
        (self.cx_base_error(a, b) * self.params.gamma.powi(k as i32)).clamp(0.0, 1.0)
    }

    /// Smallest hop distance between the endpoints of two pairs.
    pub fn pair_distance(&self, p: (usize, usize), q: (usize, usize)) -> Option<usize> {
        self.device.set_distance(&[p.0, p.1], &[q.0, q.1])
    }

    pub fn couples(&self, p: (usize, usize), q: (usize, usize)) -> bool {
        self.pair_distance(p, q)
            .is_some_and(|d| d <= self.params.hop_threshold)
    }

    pub fn idle_error(&self, idle: u64) -> f64 {
        if self.params.noiseless || self.params.idle_rate <= 0.0 {
            0.0
        } else {
            1.0 - (-self.params.idle_rate * idle as f64).exp()
        }
    }
}
