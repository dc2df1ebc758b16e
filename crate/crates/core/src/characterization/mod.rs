//! Randomized benchmarking, crosstalk presence and buffer gain.

pub mod clifford;
pub mod fit;
pub mod rb;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use clifford::{random_clifford, Pauli, Tableau};
pub use fit::{fit_decay, DecayFit};
pub use rb::{gen_rb_circuit, run_rb, survival_csv, RbConfig, RbError, RbResult};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("empty error-rate list")]
    Empty,
    #[error("isolated and simultaneous lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("mean error rate is zero, CV is undefined")]
    ZeroMean,
    #[error("gain needs buffer 0 and at least one buffer >= 2")]
    MissingBuffer,
    #[error("no PST values for buffer {0}")]
    EmptyBuffer(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub cv: f64,
}

pub fn spread(xs: &[f64]) -> Result<Spread, MetricError> {
    if xs.is_empty() {
        return Err(MetricError::Empty);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(MetricError::ZeroMean);
    }
    let std = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    Ok(Spread {
        mean,
        std,
        cv: std / mean,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationReport {
    pub eps_rb: Vec<f64>,
    pub eps_simrb: Vec<f64>,
    pub rb: Spread,
    pub simrb: Spread,
    pub cv_rb: f64,
    pub cv_simrb: f64,
    pub ct: f64,
}

/// `ct = CV_SimRB - CV_RB` over per-target error rates.
pub fn crosstalk_presence(
    isolated: &[f64],
    simultaneous: &[f64],
) -> Result<CharacterizationReport, MetricError> {
    if isolated.len() != simultaneous.len() {
        return Err(MetricError::LengthMismatch(isolated.len(), simultaneous.len()));
    }
    let rb = spread(isolated)?;
    let simrb = spread(simultaneous)?;
    Ok(CharacterizationReport {
        eps_rb: isolated.to_vec(),
        eps_simrb: simultaneous.to_vec(),
        rb,
        simrb,
        cv_rb: rb.cv,
        cv_simrb: simrb.cv,
        ct: simrb.cv - rb.cv,
    })
}

/// Buffered-minus-dense PST gain: the largest `mean PST_j - mean PST_0`
/// over buffers `j >= 2` present in the map.
pub fn gain(pst_by_buffer: &BTreeMap<usize, Vec<f64>>) -> Result<f64, MetricError> {
    let mean = |d: usize| -> Result<f64, MetricError> {
        let v = &pst_by_buffer[&d];
        if v.is_empty() {
            return Err(MetricError::EmptyBuffer(d));
        }
        Ok(v.iter().sum::<f64>() / v.len() as f64)
    };
    if !pst_by_buffer.contains_key(&0) {
        return Err(MetricError::MissingBuffer);
    }
    let dense = mean(0)?;
    let mut best: Option<f64> = None;
    for &d in pst_by_buffer.keys().filter(|&&d| d >= 2) {
        let g = mean(d)? - dense;
        best = Some(best.map_or(g, |b: f64| b.max(g)));
    }
    best.ok_or(MetricError::MissingBuffer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_ct() {
        let r = crosstalk_presence(&[0.01, 0.01], &[0.01, 0.03]).unwrap();
        assert_eq!(r.cv_rb, 0.0);
        assert!((r.cv_simrb - 0.5).abs() < 1e-12);
        assert!((r.ct - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_lists_have_zero_ct() {
        let r = crosstalk_presence(&[0.01, 0.02, 0.04], &[0.01, 0.02, 0.04]).unwrap();
        assert_eq!(r.ct, 0.0);
    }

    #[test]
    fn metric_errors() {
        assert_eq!(crosstalk_presence(&[], &[]), Err(MetricError::Empty));
        assert_eq!(crosstalk_presence(&[0.0], &[0.1]), Err(MetricError::ZeroMean));
        assert_eq!(
            crosstalk_presence(&[0.1], &[0.1, 0.2]),
            Err(MetricError::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn gain_arithmetic() {
        let m = BTreeMap::from([(0, vec![0.60]), (2, vec![0.68]), (3, vec![0.66])]);
        assert!((gain(&m).unwrap() - 0.08).abs() < 1e-12);
        let flat = BTreeMap::from([(0, vec![0.5, 0.7]), (2, vec![0.6])]);
        assert!(gain(&flat).unwrap().abs() < 1e-12);
    }

    #[test]
    fn gain_needs_levels() {
        assert_eq!(gain(&BTreeMap::from([(0, vec![0.5]), (1, vec![0.6])])), Err(MetricError::MissingBuffer));
        assert_eq!(gain(&BTreeMap::from([(2, vec![0.5])])), Err(MetricError::MissingBuffer));
        assert_eq!(gain(&BTreeMap::from([(0, vec![0.5]), (2, vec![])])), Err(MetricError::EmptyBuffer(2)));
    }
}
