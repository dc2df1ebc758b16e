//! Damped least-squares fit of `P(m) = A * alpha^m + B`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub a: f64,
    pub alpha: f64,
    pub b: f64,
    /// Sum of squared residuals.
    pub residual: f64,
    /// False when the data do not decay or the solver did not settle.
    pub ok: bool,
}

const ALPHA_MIN: f64 = 1e-9;
const MAX_ITER: usize = 500;

fn model(p: [f64; 3], m: f64) -> f64 {
    p[0] * p[1].powf(m) + p[2]
}

fn rss(p: [f64; 3], xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&m, &y)| (model(p, m) - y).powi(2))
        .sum()
}

fn clamp(p: [f64; 3]) -> [f64; 3] {
    [p[0], p[1].clamp(ALPHA_MIN, 1.0), p[2].clamp(0.0, 1.0)]
}

/// Solves the 3x3 system by Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn initial_guess(xs: &[f64], ys: &[f64]) -> [f64; 3] {
    let max = ys.iter().copied().fold(f64::MIN, f64::max);
    let min = ys.iter().copied().fold(f64::MAX, f64::min);
    let a = (max - min).max(1e-6);
    let b = min.clamp(0.0, 1.0);
    // log-linear regression of (P - B); the minimum itself is dropped
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, &y)| y - b > 1e-12)
        .map(|(&m, &y)| (m, (y - b).ln()))
        .collect();
    let alpha = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx > 0.0 {
            (sxy / sxx).exp()
        } else {
            0.99
        }
    } else {
        0.99
    };
    clamp([a, alpha, b])
}

/// Whether the means never decrease with length.
fn non_decreasing(xs: &[f64], ys: &[f64]) -> bool {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    idx.windows(2).all(|w| ys[w[1]] >= ys[w[0]])
}

/// Fits `A * alpha^m + B` to `(lengths, survival)` with `alpha` in `(0, 1]`
/// and `B` in `[0, 1]`.
pub fn fit_decay(lengths: &[usize], survival: &[f64]) -> DecayFit {
    assert_eq!(lengths.len(), survival.len());
    let xs: Vec<f64> = lengths.iter().map(|&m| m as f64).collect();
    let ys = survival;
    if non_decreasing(&xs, ys) {
        let mean = ys.iter().sum::<f64>() / ys.len().max(1) as f64;
        let p = [0.0, 1.0, mean.clamp(0.0, 1.0)];
        return DecayFit {
            a: p[0],
            alpha: p[1],
            b: p[2],
            residual: rss(p, &xs, ys),
            ok: false,
        };
    }
    let mut p = initial_guess(&xs, ys);
    let mut cost = rss(p, &xs, ys);
    let mut lambda = 1e-3;
    let mut settled = false;
    for _ in 0..MAX_ITER {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (&m, &y) in xs.iter().zip(ys) {
            let am = p[1].powf(m);
            let grad = [am, p[0] * m * p[1].powf(m - 1.0), 1.0];
            let r = model(p, m) - y;
            for i in 0..3 {
                jtr[i] += grad[i] * r;
                for j in 0..3 {
                    jtj[i][j] += grad[i] * grad[j];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut damped = jtj;
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-12);
            }
            let Some(step) = solve3(damped, jtr.map(|v| -v)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = clamp([p[0] + step[0], p[1] + step[1], p[2] + step[2]]);
            let trial_cost = rss(trial, &xs, ys);
            if trial_cost <= cost {
                let delta = cost - trial_cost;
                p = trial;
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                if delta <= 1e-15 * (1.0 + cost) {
                    settled = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved || settled {
            settled = true;
            break;
        }
    }
    DecayFit {
        a: p[0],
        alpha: p[1],
        b: p[2],
        residual: cost,
        ok: settled,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LENGTHS: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];

    fn exact(a: f64, alpha: f64, b: f64) -> Vec<f64> {
        LENGTHS.iter().map(|&m| a * alpha.powi(m as i32) + b).collect()
    }

    #[test]
    fn recovers_exact_decay() {
        let f = fit_decay(&LENGTHS, &exact(0.75, 0.95, 0.25));
        assert!(f.ok);
        assert!((f.alpha - 0.95).abs() < 1e-6, "{f:?}");
        assert!((f.a - 0.75).abs() < 1e-4 && (f.b - 0.25).abs() < 1e-4);
    }

    #[test]
    fn recovers_fast_decay() {
        let f = fit_decay(&LENGTHS, &exact(0.5, 0.7, 0.5));
        assert!((f.alpha - 0.7).abs() < 1e-4, "{f:?}");
    }

    #[test]
    fn flat_data_is_flagged() {
        let f = fit_decay(&LENGTHS, &[1.0; 7]);
        assert!(!f.ok);
        assert_eq!(f.alpha, 1.0);
    }

    #[test]
    fn rising_data_is_flagged() {
        let ys: Vec<f64> = (0..7).map(|i| 0.3 + 0.1 * i as f64).collect();
        assert!(!fit_decay(&LENGTHS, &ys).ok);
    }

    #[test]
    fn bounds_hold_on_noisy_data() {
        let ys = [0.99, 0.97, 0.96, 0.9, 0.85, 0.7, 0.6];
        let f = fit_decay(&LENGTHS, &ys);
        assert!(f.alpha > 0.0 && f.alpha <= 1.0);
        assert!((0.0..=1.0).contains(&f.b));
    }

    #[test]
    fn solve3_identity() {
        let x = solve3([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 4.0]], [1.0, 2.0, 4.0]);
        assert_eq!(x, Some([1.0, 1.0, 1.0]));
    }
}
