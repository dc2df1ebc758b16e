//! Dense statevector with qubit `q` on bit `q` of the amplitude index.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::{GateKind, GateOp};

pub type Matrix2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn u3(theta: f64, phi: f64, lambda: f64) -> Matrix2 {
    let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [
        [c(cos, 0.0), -Complex64::from_polar(sin, lambda)],
        [
            Complex64::from_polar(sin, phi),
            Complex64::from_polar(cos, phi + lambda),
        ],
    ]
}

fn diag(a: Complex64, b: Complex64) -> Matrix2 {
    [[a, c(0.0, 0.0)], [c(0.0, 0.0), b]]
}

/// Matrix of a single-qubit gate, `None` for anything else.
pub fn gate_matrix(g: &GateOp) -> Option<Matrix2> {
    let p = |i: usize| g.params[i].radians();
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    Some(match g.kind {
        GateKind::U3 => u3(p(0), p(1), p(2)),
        GateKind::U2 => u3(std::f64::consts::FRAC_PI_2, p(0), p(1)),
        GateKind::U1 => diag(one, Complex64::from_polar(1.0, p(0))),
        GateKind::Rz => diag(
            Complex64::from_polar(1.0, -p(0) / 2.0),
            Complex64::from_polar(1.0, p(0) / 2.0),
        ),
        GateKind::Sx => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        GateKind::X => [[zero, one], [one, zero]],
        GateKind::H => {
            let h = c(FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        GateKind::T => diag(one, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
        GateKind::Tdg => diag(one, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)),
        GateKind::S => diag(one, c(0.0, 1.0)),
        GateKind::Sdg => diag(one, c(0.0, -1.0)),
        GateKind::Cx | GateKind::Barrier | GateKind::Measure => return None,
    })
}

/// Single-qubit Pauli by index: 0 = I, 1 = X, 2 = Y, 3 = Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pauli1(pub u8);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`
    pub fn zero(n_qubits: usize) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_matrix(&mut self, q: usize, m: &Matrix2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    pub fn apply_x(&mut self, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    pub fn apply_z(&mut self, q: usize) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a = -*a;
            }
        }
    }

    /// Applies a Pauli up to global phase.
    pub fn apply_pauli(&mut self, q: usize, p: Pauli1) {
        match p.0 {
            1 => self.apply_x(q),
            2 => {
                self.apply_z(q);
                self.apply_x(q);
            }
            3 => self.apply_z(q),
            _ => {}
        }
    }

    /// Applies a unitary gate; measures and barriers are ignored.
    pub fn apply_gate(&mut self, g: &GateOp) {
        match g.kind {
            GateKind::Cx => self.apply_cx(g.qubits[0], g.qubits[1]),
            GateKind::Barrier | GateKind::Measure => {}
            _ => {
                let m = gate_matrix(g).expect("single-qubit gate");
                self.apply_matrix(g.qubits[0], &m);
            }
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability that qubit `q` reads 1.
    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects qubit `q` onto `outcome` and renormalizes. Returns the
    /// probability of that outcome before projection.
    pub fn collapse(&mut self, q: usize, outcome: bool) -> f64 {
        let bit = 1usize << q;
        let mut p = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit) != 0) != outcome {
                *a = Complex64::new(0.0, 0.0);
            } else {
                p += a.norm_sqr();
            }
        }
        if p > 0.0 {
            let s = 1.0 / p.sqrt();
            self.amps.iter_mut().for_each(|a| *a *= s);
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Angle;

    #[test]
    fn bell_state() {
        let mut s = StateVector::zero(2);
        s.apply_gate(&GateOp::single(GateKind::H, 0));
        s.apply_gate(&GateOp::cx(0, 1));
        let p = s.probabilities();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[3] - 0.5).abs() < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sx_squared_is_x() {
        let mut s = StateVector::zero(1);
        s.apply_gate(&GateOp::single(GateKind::Sx, 0));
        s.apply_gate(&GateOp::single(GateKind::Sx, 0));
        assert!((s.prob_one(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn u3_pi_is_x_up_to_phase() {
        let mut s = StateVector::zero(1);
        let g = GateOp::with_params(
            GateKind::U3,
            vec![0],
            vec![Angle::pi_frac(1, 1), Angle::zero(), Angle::pi_frac(1, 1)],
        );
        s.apply_gate(&g);
        assert!((s.prob_one(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn every_gate_is_unitary() {
        for kind in GateKind::ALL {
            if kind.arity() != Some(1) || kind == GateKind::Measure {
                continue;
            }
            let params = vec![Angle::Value(0.3); kind.param_count()];
            let g = GateOp::with_params(kind, vec![0], params);
            let m = gate_matrix(&g).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - Complex64::new(expect, 0.0)).norm() < 1e-12, "{kind}");
                }
            }
        }
    }

    #[test]
    fn collapse_renormalizes() {
        let mut s = StateVector::zero(1);
        s.apply_gate(&GateOp::single(GateKind::H, 0));
        let p = s.collapse(0, true);
        assert!((p - 0.5).abs() < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((s.prob_one(0) - 1.0).abs() < 1e-12);
    }
}
