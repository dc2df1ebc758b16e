//! Pauli operators, Clifford tableaux, uniform Clifford sampling and
//! tableau synthesis.
//!
//! A Pauli is stored as `i^phase * X^x * Z^z` with one bit per qubit.

use rand::Rng;

use crate::circuit::{Angle, GateKind, GateOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pauli {
    pub x: u64,
    pub z: u64,
    pub phase: u8,
}

impl Pauli {
    pub const IDENTITY: Pauli = Pauli {
        x: 0,
        z: 0,
        phase: 0,
    };

    pub fn x(q: usize) -> Pauli {
        Pauli {
            x: 1 << q,
            z: 0,
            phase: 0,
        }
    }

    pub fn z(q: usize) -> Pauli {
        Pauli {
            x: 0,
            z: 1 << q,
            phase: 0,
        }
    }

    /// The Hermitian operator with these bits: `Y` carries `i`.
    pub fn hermitian(x: u64, z: u64) -> Pauli {
        Pauli {
            x,
            z,
            phase: ((x & z).count_ones() % 4) as u8,
        }
    }

    pub fn negate(self) -> Pauli {
        Pauli {
            phase: (self.phase + 2) % 4,
            ..self
        }
    }

    pub fn mul(self, other: Pauli) -> Pauli {
        let swap = 2 * (self.z & other.x).count_ones();
        Pauli {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: ((self.phase as u32 + other.phase as u32 + swap) % 4) as u8,
        }
    }

    /// 1 when the operators anticommute.
    pub fn symplectic(self, other: Pauli) -> u32 {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2
    }

    pub fn commutes(self, other: Pauli) -> bool {
        self.symplectic(other) == 0
    }

    /// Sign of a Hermitian Pauli relative to [`Pauli::hermitian`].
    pub fn is_negative(self) -> bool {
        (self.phase + 4 - Pauli::hermitian(self.x, self.z).phase) % 4 == 2
    }

    fn bits(self, q: usize) -> (bool, bool) {
        (self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    /// `g P g^dagger` for a Clifford basis gate `g`.
    pub fn conjugate(self, g: &Gate) -> Pauli {
        let mut p = self;
        match *g {
            Gate::H(q) => {
                let (x, z) = p.bits(q);
                if x && z {
                    p.phase = (p.phase + 2) % 4;
                }
                if x != z {
                    p.x ^= 1 << q;
                    p.z ^= 1 << q;
                }
            }
            Gate::S(q) => {
                if p.bits(q).0 {
                    p.z ^= 1 << q;
                    p.phase = (p.phase + 1) % 4;
                }
            }
            Gate::Sdg(q) => {
                if p.bits(q).0 {
                    p.z ^= 1 << q;
                    p.phase = (p.phase + 3) % 4;
                }
            }
            Gate::X(q) => {
                if p.bits(q).1 {
                    p.phase = (p.phase + 2) % 4;
                }
            }
            Gate::Z(q) => {
                if p.bits(q).0 {
                    p.phase = (p.phase + 2) % 4;
                }
            }
            Gate::Cx(c, t) => {
                if p.bits(c).0 {
                    p.x ^= 1 << t;
                }
                if p.bits(t).1 {
                    p.z ^= 1 << c;
                }
            }
        }
        p
    }
}

/// Clifford basis gates used by the sampler and synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Z(usize),
    Cx(usize, usize),
}

impl Gate {
    pub fn inverse(self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }

    pub fn is_cx(self) -> bool {
        matches!(self, Gate::Cx(..))
    }

    /// Circuit form; `Z` is emitted as `u1(pi)`.
    pub fn to_op(self) -> GateOp {
        match self {
            Gate::H(q) => GateOp::single(GateKind::H, q),
            Gate::S(q) => GateOp::single(GateKind::S, q),
            Gate::Sdg(q) => GateOp::single(GateKind::Sdg, q),
            Gate::X(q) => GateOp::single(GateKind::X, q),
            Gate::Z(q) => GateOp::with_params(GateKind::U1, vec![q], vec![Angle::pi_frac(1, 1)]),
            Gate::Cx(c, t) => GateOp::cx(c, t),
        }
    }
}

/// Images of `X_j` and `Z_j` under conjugation by the Clifford.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tableau {
    n: usize,
    xs: Vec<Pauli>,
    zs: Vec<Pauli>,
}

impl Tableau {
    pub fn identity(n: usize) -> Tableau {
        Tableau {
            n,
            xs: (0..n).map(Pauli::x).collect(),
            zs: (0..n).map(Pauli::z).collect(),
        }
    }

    pub fn from_gates(n: usize, gates: &[Gate]) -> Tableau {
        let mut t = Tableau::identity(n);
        for g in gates {
            t.apply_gate(g);
        }
        t
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, q: usize) -> Pauli {
        self.xs[q]
    }

    pub fn z_image(&self, q: usize) -> Pauli {
        self.zs[q]
    }

    pub fn is_identity(&self) -> bool {
        *self == Tableau::identity(self.n)
    }

    /// Appends a gate to the circuit this tableau represents.
    pub fn apply_gate(&mut self, g: &Gate) {
        for p in self.xs.iter_mut().chain(self.zs.iter_mut()) {
            *p = p.conjugate(g);
        }
    }

    /// `U P U^dagger`.
    pub fn conjugate(&self, p: Pauli) -> Pauli {
        let mut out = Pauli {
            phase: p.phase,
            ..Pauli::IDENTITY
        };
        for q in 0..self.n {
            if p.x >> q & 1 == 1 {
                out = out.mul(self.xs[q]);
            }
        }
        for q in 0..self.n {
            if p.z >> q & 1 == 1 {
                out = out.mul(self.zs[q]);
            }
        }
        out
    }

    /// Circuit `self` followed by circuit `next`.
    pub fn then(&self, next: &Tableau) -> Tableau {
        assert_eq!(self.n, next.n);
        Tableau {
            n: self.n,
            xs: self.xs.iter().map(|&p| next.conjugate(p)).collect(),
            zs: self.zs.iter().map(|&p| next.conjugate(p)).collect(),
        }
    }

    pub fn inverse(&self) -> Tableau {
        let solve = |g: Pauli| {
            let mut q = Pauli::IDENTITY;
            for k in 0..self.n {
                if g.symplectic(self.zs[k]) == 1 {
                    q.x |= 1 << k;
                }
                if g.symplectic(self.xs[k]) == 1 {
                    q.z |= 1 << k;
                }
            }
            let img = self.conjugate(q);
            debug_assert_eq!((img.x, img.z), (g.x, g.z));
            q.phase = (g.phase + 4 - img.phase) % 4;
            q
        };
        Tableau {
            n: self.n,
            xs: (0..self.n).map(|j| solve(Pauli::x(j))).collect(),
            zs: (0..self.n).map(|j| solve(Pauli::z(j))).collect(),
        }
    }
}

/// Gates on qubits `i..` that conjugate `p` to `X_i` and `q` to `Z_i`.
/// `p` and `q` must anticommute and be supported on `i..`.
pub fn sweep(i: usize, n: usize, mut p: Pauli, mut q: Pauli) -> Vec<Gate> {
    let mut gates = Vec::new();
    let mut push = |g: Gate, p: &mut Pauli, q: &mut Pauli| {
        *p = p.conjugate(&g);
        *q = q.conjugate(&g);
        gates.push(g);
    };
    // p -> X-type
    for j in i..n {
        match p.bits(j) {
            (true, true) => push(Gate::S(j), &mut p, &mut q),
            (false, true) => push(Gate::H(j), &mut p, &mut q),
            _ => {}
        }
    }
    let j0 = (i..n).find(|&j| p.bits(j).0).expect("p is not the identity");
    for j in i..n {
        if j != j0 && p.bits(j).0 {
            push(Gate::Cx(j0, j), &mut p, &mut q);
        }
    }
    if j0 != i {
        push(Gate::Cx(i, j0), &mut p, &mut q);
        push(Gate::Cx(j0, i), &mut p, &mut q);
        push(Gate::Cx(i, j0), &mut p, &mut q);
    }
    // p = +-X_i. Move to Z_i and clear q down to X_i.
    push(Gate::H(i), &mut p, &mut q);
    for j in i..n {
        match q.bits(j) {
            (true, true) => push(Gate::S(j), &mut p, &mut q),
            (false, true) if j != i => push(Gate::H(j), &mut p, &mut q),
            _ => {}
        }
    }
    for j in i + 1..n {
        if q.bits(j).0 {
            push(Gate::Cx(i, j), &mut p, &mut q);
        }
    }
    push(Gate::H(i), &mut p, &mut q);
    if p.is_negative() {
        push(Gate::Z(i), &mut p, &mut q);
    }
    if q.is_negative() {
        push(Gate::X(i), &mut p, &mut q);
    }
    debug_assert_eq!(p, Pauli::x(i));
    debug_assert_eq!(q, Pauli::z(i));
    gates
}

/// One independent choice of the sampler for qubit `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Choice {
    pub p: Pauli,
    pub q: Pauli,
}

/// All Pauli bit patterns on qubits `i..n`, identity excluded.
fn patterns(i: usize, n: usize) -> Vec<Pauli> {
    let width = n - i;
    let mut out = Vec::new();
    for bits in 1u64..(1 << (2 * width)) {
        let x = (bits & ((1 << width) - 1)) << i;
        let z = (bits >> width) << i;
        out.push(Pauli::hermitian(x, z));
    }
    out
}

fn draw_choice<R: Rng + ?Sized>(i: usize, n: usize, rng: &mut R) -> Choice {
    let ps = patterns(i, n);
    let p = ps[rng.gen_range(0..ps.len())];
    let qs: Vec<Pauli> = ps.into_iter().filter(|&q| !q.commutes(p)).collect();
    let q = qs[rng.gen_range(0..qs.len())];
    let p = if rng.gen::<bool>() { p.negate() } else { p };
    let q = if rng.gen::<bool>() { q.negate() } else { q };
    Choice { p, q }
}

/// Gates of the Clifford fixed by one choice per qubit. The Clifford maps
/// `X_i -> choices[i].p` and `Z_i -> choices[i].q` on the subspace left by
/// earlier qubits.
pub fn clifford_gates(n: usize, choices: &[Choice]) -> Vec<Gate> {
    let mut gates = Vec::new();
    for i in (0..n).rev() {
        let k = sweep(i, n, choices[i].p, choices[i].q);
        gates.extend(k.iter().rev().map(|g| g.inverse()));
    }
    gates
}

/// Uniformly random `n`-qubit Clifford: tableau and basis gates.
pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Tableau, Vec<Gate>) {
    let choices: Vec<Choice> = (0..n).map(|i| draw_choice(i, n, rng)).collect();
    let gates = clifford_gates(n, &choices);
    (Tableau::from_gates(n, &gates), gates)
}

/// Every choice tuple's cx count, for the exact cx-count distribution of
/// the sampler. Returns `(cx count, probability)` pairs.
pub fn cx_count_distribution(n: usize) -> Vec<(usize, f64)> {
    let mut hist: std::collections::BTreeMap<usize, u64> = Default::default();
    let mut total = 0u64;
    fn rec(i: usize, n: usize, acc: usize, hist: &mut std::collections::BTreeMap<usize, u64>, total: &mut u64) {
        if i == n {
            *hist.entry(acc).or_insert(0) += 1;
            *total += 1;
            return;
        }
        let ps = patterns(i, n);
        for &p in &ps {
            for &q in ps.iter().filter(|q| !q.commutes(p)) {
                // signs never change the cx count
                let cx = sweep(i, n, p, q).iter().filter(|g| g.is_cx()).count();
                rec(i + 1, n, acc + cx, hist, total);
            }
        }
    }
    rec(0, n, 0, &mut hist, &mut total);
    hist.into_iter()
        .map(|(k, c)| (k, c as f64 / total as f64))
        .collect()
}

/// Gates implementing an arbitrary tableau.
pub fn synthesize(t: &Tableau) -> Vec<Gate> {
    // Reduce t to the identity with sweeps K_0, K_1, ...; t is then the
    // inverse of their product.
    let n = t.n_qubits();
    let mut w = t.clone();
    let mut reduce = Vec::new();
    for i in 0..n {
        let k = sweep(i, n, w.x_image(i), w.z_image(i));
        for g in &k {
            w.apply_gate(g);
        }
        reduce.extend(k);
    }
    debug_assert!(w.is_identity());
    reduce.iter().rev().map(|g| g.inverse()).collect()
}

/// Gates implementing the inverse of `t`.
pub fn synthesize_inverse(t: &Tableau) -> Vec<Gate> {
    let n = t.n_qubits();
    let mut w = t.clone();
    let mut out = Vec::new();
    for i in 0..n {
        let k = sweep(i, n, w.x_image(i), w.z_image(i));
        for g in &k {
            w.apply_gate(g);
        }
        out.extend(k);
    }
    out
}
