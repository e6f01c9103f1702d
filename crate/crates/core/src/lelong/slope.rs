use serde::{Deserialize, Serialize};

use crate::stats::fit_line;

/// Fraction of the grid, from the smallest radius up, used by the fit.
pub const WINDOW_FRACTION: f64 = 0.6;
/// Exponents tried when extrapolating secant slopes.
const P_GRID: (f64, f64, usize) = (0.1, 4.0, 79);
/// Chi-square improvement needed before a drifting model replaces the
/// constant one.
const DRIFT_CHI2: f64 = 25.0;

/// Ordinates `v_k` against `t_k = log r_k` with the fitted slope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// Abscissae `log r_k`, decreasing.
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Least-squares slope over the window.
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub max_residual: f64,
    /// Number of trailing (smallest-radius) points in the fit.
    pub window: usize,
    pub monotone_nondecreasing: bool,
    pub midpoint_convex: bool,
    /// Estimate of the slope as `t → -∞`.
    pub limit: f64,
    /// Whether `limit` came from the drift model rather than `slope`.
    pub extrapolated: bool,
}

impl SlopeFit {
    /// Builds the fit. `t` must be strictly decreasing with at least four
    /// points.
    pub fn new(t: Vec<f64>, values: Vec<f64>, stderr: Vec<f64>) -> Self {
        let m = t.len();
        assert!(m >= 4 && values.len() == m && stderr.len() == m);
        let window = ((WINDOW_FRACTION * m as f64).ceil() as usize).clamp(2, m);
        let lo = m - window;
        let fit = fit_line(&t[lo..], &values[lo..], Some(&stderr[lo..]));
        let slack = |ks: &[usize]| {
            let round = ks.iter().map(|&k| values[k].abs()).fold(1.0, f64::max) * 1e-12;
            3.0 * ks.iter().map(|&k| stderr[k] * stderr[k]).sum::<f64>().sqrt() + round
        };
        // t decreases with k, so nondecreasing in t means v_k >= v_{k+1}.
        let monotone_nondecreasing = (0..m - 1).all(|k| values[k] >= values[k + 1] - slack(&[k, k + 1]));
        let midpoint_convex = (1..m - 1).all(|k| {
            let (a, b) = (t[k - 1] - t[k], t[k] - t[k + 1]);
            // convexity at unequal spacing: weighted chord above the middle value
            let chord = (b * values[k - 1] + a * values[k + 1]) / (a + b);
            chord >= values[k] - slack(&[k - 1, k, k + 1])
        });
        let (limit, extrapolated) = match drift_limit(&t, &values, &stderr) {
            Some(v) => (v, true),
            None => (fit.slope, false),
        };
        SlopeFit {
            t,
            values,
            stderr,
            slope: fit.slope,
            intercept: fit.intercept,
            slope_stderr: fit.slope_stderr,
            max_residual: fit.max_residual,
            window,
            monotone_nondecreasing,
            midpoint_convex,
            limit,
            extrapolated,
        }
    }
}

/// Fits the secant slopes to `ν + c |τ|^{-p}` over a grid of `p`. Returns `ν`,
/// clamped to `[0, deepest secant]`, when the drift is statistically
/// significant against a constant.
fn drift_limit(t: &[f64], v: &[f64], se: &[f64]) -> Option<f64> {
    let m = t.len();
    if m < 4 {
        return None;
    }
    let mut s = Vec::with_capacity(m - 1);
    let mut tau = Vec::with_capacity(m - 1);
    let mut w = Vec::with_capacity(m - 1);
    for k in 0..m - 1 {
        let dt = t[k] - t[k + 1];
        let sk = (v[k] - v[k + 1]) / dt;
        let sig = ((se[k].powi(2) + se[k + 1].powi(2)).sqrt() / dt).max(1e-9 * (1.0 + sk.abs()));
        s.push(sk);
        tau.push((0.5 * (t[k] + t[k + 1])).abs().max(1e-12));
        w.push(1.0 / (sig * sig));
    }
    let sw: f64 = w.iter().sum();
    let mean = s.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let chi0: f64 = s.iter().zip(&w).map(|(a, b)| b * (a - mean).powi(2)).sum();
    let (p0, p1, steps) = P_GRID;
    let mut best: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let p = p0 + (p1 - p0) * i as f64 / steps as f64;
        let x: Vec<f64> = tau.iter().map(|u| u.powf(-p)).collect();
        let (nu, c) = weighted_line(&x, &s, &w);
        let chi: f64 = (0..s.len()).map(|k| w[k] * (s[k] - nu - c * x[k]).powi(2)).sum();
        if best.is_none_or(|(b, _)| chi < b) {
            best = Some((chi, nu));
        }
    }
    let (chi, nu) = best?;
    if chi0 - chi <= DRIFT_CHI2 {
        return None;
    }
    let deepest = *s.last().expect("at least three secants");
    Some(nu.min(deepest).max(0.0))
}

/// Weighted least squares `y = a + b x`, returns `(a, b)`.
fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64) {
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - xm).powi(2)).sum();
    let sxy: f64 = (0..x.len()).map(|k| w[k] * (x[k] - xm) * (y[k] - ym)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (ym - b * xm, b)
}
