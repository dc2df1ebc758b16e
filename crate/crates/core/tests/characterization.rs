use std::collections::BTreeMap;

use proptest::prelude::*;
use quilt::characterization::clifford::{synthesize, synthesize_inverse};
use quilt::characterization::{
    crosstalk_presence, fit_decay, gain, random_clifford, run_rb, spread, MetricError, RbConfig, Tableau,
};
use quilt::hardware::line;
use quilt::sim::{NoiseModel, NoiseParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn clifford(n: usize, seed: u64) -> Tableau {
    random_clifford(n, &mut ChaCha8Rng::seed_from_u64(seed)).0
}

proptest! {
    #[test]
    fn composition_is_associative(n in 1usize..5, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (a, b, c) = (clifford(n, a), clifford(n, b), clifford(n, c));
        prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
    }

    #[test]
    fn inverse_and_synthesis_agree(n in 1usize..6, seed in any::<u64>()) {
        let t = clifford(n, seed);
        prop_assert!(t.then(&t.inverse()).is_identity());
        prop_assert!(t.inverse().then(&t).is_identity());
        prop_assert_eq!(Tableau::from_gates(n, &synthesize(&t)), t.clone());
        prop_assert_eq!(Tableau::from_gates(n, &synthesize_inverse(&t)), t.inverse());
    }

    #[test]
    fn cv_is_scale_invariant(xs in prop::collection::vec(1e-6f64..1.0, 1..20), k in 1e-3f64..1e3) {
        let a = spread(&xs).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| x * k).collect();
        let b = spread(&scaled).unwrap();
        prop_assert!((a.cv - b.cv).abs() <= 1e-9 * a.cv.max(1.0));
        let r = crosstalk_presence(&xs, &scaled).unwrap();
        prop_assert!(r.ct.abs() <= 1e-9 * a.cv.max(1.0));
    }

    #[test]
    fn fit_recovers_noiseless_decays(a in 0.2f64..0.8, alpha in 0.5f64..0.999, b in 0.0f64..0.3) {
        let lengths = [1usize, 2, 4, 8, 16, 32, 64, 128];
        let ys: Vec<f64> = lengths.iter().map(|&m| a * alpha.powi(m as i32) + b).collect();
        let f = fit_decay(&lengths, &ys);
        prop_assert!(f.ok);
        prop_assert!((f.alpha - alpha).abs() < 1e-4, "{:?}", f);
    }
}

#[test]
fn hand_computed_spread() {
    let s = spread(&[0.01, 0.02, 0.03, 0.06]).unwrap();
    // squared deviations 4e-4, 1e-4, 0, 9e-4 over 4
    let std = (3.5e-4f64).sqrt();
    assert!((s.mean - 0.03).abs() < 1e-15);
    assert!((s.std - std).abs() < 1e-15);
    assert!((s.cv - std / 0.03).abs() < 1e-12);
    let r = crosstalk_presence(&[0.02, 0.02, 0.02, 0.02], &[0.01, 0.02, 0.03, 0.06]).unwrap();
    assert_eq!(r.cv_rb, 0.0);
    assert!((r.ct - std / 0.03).abs() < 1e-12);
}

#[test]
fn metric_errors() {
    assert_eq!(spread(&[]).unwrap_err(), MetricError::Empty);
    assert_eq!(spread(&[0.0, 0.0]).unwrap_err(), MetricError::ZeroMean);
    assert_eq!(crosstalk_presence(&[0.1], &[0.1, 0.2]).unwrap_err(), MetricError::LengthMismatch(1, 2));
    let only_dense = BTreeMap::from([(0, vec![0.5]), (1, vec![0.6])]);
    assert_eq!(gain(&only_dense).unwrap_err(), MetricError::MissingBuffer);
    let g = gain(&BTreeMap::from([(0, vec![0.5, 0.7]), (2, vec![0.7]), (3, vec![0.65, 0.75])])).unwrap();
    assert!((g - 0.1).abs() < 1e-12);
}

fn cfg(seed: u64) -> RbConfig {
    RbConfig {
        lengths: vec![1, 2, 4, 8, 16, 32, 64],
        samples: 6,
        shots: 512,
        seed,
    }
}

fn eps(targets: &[Vec<usize>], simultaneous: bool, cfg: &RbConfig, nm: &NoiseModel) -> Vec<f64> {
    run_rb(targets, simultaneous, cfg, nm)
        .unwrap()
        .iter()
        .map(|r| r.epc)
        .collect()
}

#[test]
fn simultaneous_rb_exposes_adjacent_crosstalk() {
    let h = line(4, &[0.01; 3]).with_errors(0.01, 0.0, 0.0);
    let nm = NoiseModel::new(&h, NoiseParams::default());
    let targets = vec![vec![0, 1], vec![2, 3]];
    let (mut iso, mut sim) = (0.0, 0.0);
    for seed in 0..5 {
        iso += eps(&targets, false, &cfg(seed), &nm).iter().sum::<f64>();
        sim += eps(&targets, true, &cfg(seed), &nm).iter().sum::<f64>();
    }
    assert!(sim > 1.5 * iso, "simultaneous {sim} vs isolated {iso}");
}

#[test]
fn distant_targets_are_unaffected() {
    let h = line(6, &[0.01; 5]).with_errors(0.01, 0.001, 0.0);
    let nm = NoiseModel::new(&h, NoiseParams { gamma: 4.0, ..NoiseParams::default() });
    let targets = vec![vec![0, 1], vec![4, 5]];
    let c = cfg(3);
    assert_eq!(eps(&targets, false, &c, &nm), eps(&targets, true, &c, &nm));
}

#[test]
fn unit_gamma_means_no_crosstalk() {
    let h = line(4, &[0.02; 3]).with_errors(0.02, 0.0, 0.0);
    let nm = NoiseModel::new(&h, NoiseParams { gamma: 1.0, ..NoiseParams::default() });
    let targets = vec![vec![0, 1], vec![2, 3]];
    let c = cfg(1);
    let iso = eps(&targets, false, &c, &nm);
    let sim = eps(&targets, true, &c, &nm);
    assert_eq!(iso, sim);
    assert_eq!(crosstalk_presence(&iso, &sim).unwrap().ct, 0.0);
}

#[test]
fn single_qubit_targets() {
    let h = line(3, &[0.01; 2]).with_errors(0.01, 0.002, 0.0);
    let nm = NoiseModel::new(&h, NoiseParams::default());
    let r = run_rb(&[vec![0], vec![2]], true, &cfg(0), &nm).unwrap();
    for x in &r {
        assert!(x.cx_error().is_none());
        assert!(x.epc > 0.0 && x.epc < 0.01, "{}", x.epc);
    }
}
