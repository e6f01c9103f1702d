//! Dyadic-annulus decomposition of `∫_B g` for nonnegative `g` that may blow
//! up at the center of the ball (or along a coordinate flat through it).

use serde::Serialize;

use super::{check_dim, Estimate, QuadratureError, MAX_REDRAWS};
use crate::function_model::{ModelError, Point, PshExpr};
use crate::geometry::{fill_ball, fill_shell, BallSpec};
use crate::rng::{map_chunks, substream};
use crate::stats::fit_line;

/// A nonnegative integrand, evaluated in log space.
#[derive(Clone, Debug)]
pub enum Integrand {
    /// `exp(-2 f / r)`.
    ExpNeg { f: PshExpr, r: f64 },
    /// `|∇f|²` with the real gradient.
    GradSquared { f: PshExpr },
}

impl Integrand {
    pub fn exp_neg(f: PshExpr, r: f64) -> Result<Self, ModelError> {
        if !(r.is_finite() && r > 0.0) {
            return Err(ModelError::InvalidNode(format!("exponent scale {r} must be positive")));
        }
        Ok(Integrand::ExpNeg { f, r })
    }

    /// `|z - center|^{-p}`, for calibration.
    pub fn distance_power(center: Point, p: f64) -> Result<Self, ModelError> {
        if !(p.is_finite() && p > 0.0) {
            return Err(ModelError::InvalidNode(format!("power {p} must be positive")));
        }
        Integrand::exp_neg(PshExpr::log_norm(center, None)?, 2.0 / p)
    }

    pub fn expr(&self) -> &PshExpr {
        match self {
            Integrand::ExpNeg { f, .. } | Integrand::GradSquared { f } => f,
        }
    }

    /// `ln g(x)`, or `None` where `g` is undefined (the singular set).
    fn ln_value(&self, x: &[f64]) -> Result<Option<f64>, ModelError> {
        match self {
            Integrand::ExpNeg { f, r } => {
                let v = f.eval_raw(x)?;
                Ok((v > f64::NEG_INFINITY).then(|| -2.0 * v / r))
            }
            Integrand::GradSquared { f } => match f.grad_raw(x) {
                Ok(g) => Ok(Some(g.components.iter().map(|c| c * c).sum::<f64>().ln())),
                Err(ModelError::SingularPoint) => Ok(None),
                Err(e) => Err(e),
            },
        }
    }
}

/// Ball split into annuli `2^{-k-1} R ≤ |x_S - c_S| < 2^{-k} R` in the
/// transverse coordinates `S`; the other coordinates range over the ball of
/// radius `R`. With `S` = all coordinates these are ordinary annuli.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnulusFrame {
    center: Point,
    transverse: Vec<usize>,
    radius: f64,
}

impl AnnulusFrame {
    pub fn point(b: &BallSpec) -> Self {
        AnnulusFrame {
            center: b.center().clone(),
            transverse: (0..b.dim()).collect(),
            radius: b.radius(),
        }
    }

    /// Annuli transverse to the flat `{z_j = c_j, j ∈ coords}`.
    pub fn transverse(b: &BallSpec, coords: Vec<usize>) -> Result<Self, ModelError> {
        let mut coords = coords;
        coords.sort_unstable();
        coords.dedup();
        if coords.is_empty() {
            return Err(ModelError::InvalidNode("empty transverse set".into()));
        }
        if let Some(&j) = coords.iter().find(|&&j| j >= b.dim()) {
            return Err(ModelError::BadCoordinate(j));
        }
        Ok(AnnulusFrame { center: b.center().clone(), transverse: coords, radius: b.radius() })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn transverse_coords(&self) -> &[usize] {
        &self.transverse
    }

    fn dim(&self) -> usize {
        self.center.dim()
    }

    fn split_real(&self) -> (Vec<usize>, Vec<usize>) {
        let mut t = Vec::new();
        let mut s = Vec::new();
        for j in 0..self.dim() {
            let dst = if self.transverse.contains(&j) { &mut t } else { &mut s };
            dst.extend([2 * j, 2 * j + 1]);
        }
        (t, s)
    }

    /// Log volume of level `k`.
    fn ln_volume(&self, k: usize) -> f64 {
        let (t, s) = self.split_real();
        let dt = t.len() as f64;
        let outer = self.radius * 0.5f64.powi(k as i32);
        let mut v = ln_unit_ball(t.len()) + dt * outer.ln() + (-(0.5f64.powf(dt))).ln_1p();
        if !s.is_empty() {
            v += ln_unit_ball(s.len()) + s.len() as f64 * self.radius.ln();
        }
        v
    }
}

/// `ln` of the volume of the unit ball in `R^d`, `d` even.
fn ln_unit_ball(d: usize) -> f64 {
    let k = d / 2;
    k as f64 * std::f64::consts::PI.ln() - (1..=k).map(|i| (i as f64).ln()).sum::<f64>()
}

/// Smallest annulus radius around a center at the origin, kept well inside
/// the normal floating point range.
pub const DEEPEST_RADIUS: f64 = 1e-280;

/// Tuning of the divergence classifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceSettings {
    /// Required decay of `ln C_k` per level for geometric convergence.
    pub delta: f64,
    /// Levels in the geometric fit.
    pub window: usize,
    /// Largest accepted tail, relative to the partial sum.
    pub tail_fraction: f64,
    /// Relative stderr above which a level counts as noisy.
    pub noisy: f64,
    /// Levels in the algebraic fit.
    pub algebraic_window: usize,
    /// Largest accepted stderr of the algebraic exponent.
    pub max_exponent_stderr: f64,
    /// Number of levels before truncation.
    pub levels: usize,
}

impl Default for DivergenceSettings {
    fn default() -> Self {
        DivergenceSettings {
            delta: 0.05,
            window: 8,
            tail_fraction: 0.01,
            noisy: 0.5,
            algebraic_window: 16,
            max_exponent_stderr: 0.25,
            levels: 40,
        }
    }
}

/// Contribution of one annulus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelContribution {
    pub level: usize,
    pub inner: f64,
    pub outer: f64,
    /// `ln C_k`; `-inf` when every sample vanished.
    pub ln_contribution: f64,
    pub rel_stderr: f64,
    pub samples: usize,
}

impl LevelContribution {
    fn scale(&self) -> f64 {
        -(self.inner * self.outer).sqrt().ln()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Outcome {
    Finite(Estimate),
    /// `growth_rate` is the fitted slope of `ln C_k` per level.
    Divergent { growth_rate: f64 },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceVerdict {
    pub outcome: Outcome,
    pub levels: Vec<LevelContribution>,
    pub geometric_slope: f64,
    pub geometric_slope_stderr: f64,
    /// Decay exponent `β` of `C_k ~ s_k^{-β}`, `s_k = -ln(radius_k)`, when
    /// the algebraic fit ran.
    pub algebraic_exponent: Option<(f64, f64)>,
    /// Name of the rule that decided.
    pub rule: &'static str,
}

impl DivergenceVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self.outcome, Outcome::Finite(_))
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self.outcome, Outcome::Divergent { .. })
    }
}

/// Log-space running sum of `g` over one chunk.
#[derive(Clone, Copy, Debug)]
struct LogSum {
    n: usize,
    max: f64,
    s1: f64,
    s2: f64,
}

impl LogSum {
    fn new() -> Self {
        LogSum { n: 0, max: f64::NEG_INFINITY, s1: 0.0, s2: 0.0 }
    }

    fn push(&mut self, w: f64) {
        self.n += 1;
        if w == f64::NEG_INFINITY {
            return;
        }
        if w > self.max {
            let f = (self.max - w).exp();
            self.s1 = self.s1 * f + 1.0;
            self.s2 = self.s2 * f * f + 1.0;
            self.max = w;
        } else {
            let e = (w - self.max).exp();
            self.s1 += e;
            self.s2 += e * e;
        }
    }

    fn merge(self, o: LogSum) -> LogSum {
        let n = self.n + o.n;
        if o.max == f64::NEG_INFINITY {
            return LogSum { n, ..self };
        }
        if self.max == f64::NEG_INFINITY {
            return LogSum { n, ..o };
        }
        let m = self.max.max(o.max);
        let (a, b) = ((self.max - m).exp(), (o.max - m).exp());
        LogSum { n, max: m, s1: self.s1 * a + o.s1 * b, s2: self.s2 * a * a + o.s2 * b * b }
    }

    /// `(ln mean, relative stderr)`.
    fn ln_mean(&self) -> (f64, f64) {
        if self.max == f64::NEG_INFINITY || self.n == 0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        let n = self.n as f64;
        let m1 = self.s1 / n;
        let m2 = self.s2 / n;
        let rel_var = (m2 / (m1 * m1) - 1.0).max(0.0);
        let rel = if self.n > 1 { (rel_var / (n - 1.0)).sqrt() } else { f64::INFINITY };
        (self.max + m1.ln(), rel)
    }
}

/// `∫_B g` with annuli around the center of `b`.
pub fn integral_with_divergence(
    g: &Integrand,
    b: &BallSpec,
    budget_per_level: usize,
    seed: u64,
) -> Result<DivergenceVerdict, QuadratureError> {
    integral_with_divergence_in(g, &AnnulusFrame::point(b), budget_per_level, seed, &DivergenceSettings::default())
}

/// `∫_B g` in an explicit annulus frame. Levels stop early once the annulus
/// radius approaches the floating point resolution around the center.
pub fn integral_with_divergence_in(
    g: &Integrand,
    frame: &AnnulusFrame,
    budget_per_level: usize,
    seed: u64,
    settings: &DivergenceSettings,
) -> Result<DivergenceVerdict, QuadratureError> {
    check_dim(g.expr(), frame.dim())?;
    if budget_per_level < 2 {
        return Err(QuadratureError::BudgetTooSmall(budget_per_level));
    }
    let (t_idx, s_idx) = frame.split_real();
    let c = frame.center.coords();
    let ct: Vec<f64> = t_idx.iter().map(|&i| c[i]).collect();
    let cs: Vec<f64> = s_idx.iter().map(|&i| c[i]).collect();
    // Offsets below this are lost when added to the center coordinates.
    let norm = ct.iter().map(|v| v * v).sum::<f64>().sqrt();
    let floor = if norm > 0.0 { 1e6 * f64::EPSILON * norm } else { DEEPEST_RADIUS };
    let mut levels = Vec::new();
    for k in 0..settings.levels {
        let outer = frame.radius * 0.5f64.powi(k as i32);
        if outer < floor {
            break;
        }
        let inner = outer / 2.0;
        let parts = map_chunks(budget_per_level, substream(seed, k as u64), |rng, range| {
            let mut acc = LogSum::new();
            let mut x = vec![0.0; c.len()];
            let mut xt = vec![0.0; ct.len()];
            let mut xs = vec![0.0; cs.len()];
            for _ in range {
                let mut tries = 0;
                let w = loop {
                    fill_shell(rng, &ct, inner, outer, &mut xt);
                    if !cs.is_empty() {
                        fill_ball(rng, &cs, frame.radius, &mut xs);
                    }
                    t_idx.iter().zip(&xt).chain(s_idx.iter().zip(&xs)).for_each(|(&i, &v)| x[i] = v);
                    if let Some(w) = g.ln_value(&x)? {
                        break w;
                    }
                    tries += 1;
                    if tries > MAX_REDRAWS {
                        return Err(QuadratureError::TooManyRedraws);
                    }
                };
                acc.push(w);
            }
            Ok(acc)
        });
        let mut acc = LogSum::new();
        for p in parts {
            acc = acc.merge(p?);
        }
        let (ln_mean, rel) = acc.ln_mean();
        levels.push(LevelContribution {
            level: k,
            inner,
            outer,
            ln_contribution: frame.ln_volume(k) + ln_mean,
            rel_stderr: rel,
            samples: budget_per_level,
        });
    }
    Ok(classify(levels, seed, settings))
}

fn finite(levels: &[LevelContribution], tail: f64, tail_err: f64, seed: u64) -> Outcome {
    let partial: f64 = levels.iter().map(|l| l.ln_contribution.exp()).sum();
    let err2: f64 = levels.iter().map(|l| (l.ln_contribution.exp() * l.rel_stderr).powi(2)).sum();
    Outcome::Finite(Estimate {
        value: partial + tail,
        stderr: err2.sqrt() + tail_err,
        budget: levels.iter().map(|l| l.samples).sum(),
        seed,
        converged: true,
    })
}

/// Decides Finite, Divergent or Inconclusive from the level contributions.
pub(crate) fn classify(levels: Vec<LevelContribution>, seed: u64, st: &DivergenceSettings) -> DivergenceVerdict {
    let mut v = DivergenceVerdict {
        outcome: Outcome::Inconclusive,
        levels,
        geometric_slope: f64::NAN,
        geometric_slope_stderr: f64::NAN,
        algebraic_exponent: None,
        rule: "",
    };
    let levels = &v.levels;
    if levels.iter().all(|l| l.ln_contribution == f64::NEG_INFINITY) {
        v.outcome = Outcome::Finite(Estimate { value: 0.0, stderr: 0.0, budget: 0, seed, converged: true });
        v.rule = "vanishing";
        return v;
    }
    if levels.len() < 3 || levels.iter().all(|l| l.rel_stderr > st.noisy) {
        v.rule = "noisy";
        return v;
    }
    let w = &levels[levels.len().saturating_sub(st.window)..];
    if w.iter().any(|l| l.ln_contribution == f64::NEG_INFINITY) {
        v.outcome = finite(levels, 0.0, 0.0, seed);
        v.rule = "vanishing-tail";
        return v;
    }
    let k: Vec<f64> = w.iter().map(|l| l.level as f64).collect();
    let y: Vec<f64> = w.iter().map(|l| l.ln_contribution).collect();
    let sig: Vec<f64> = w.iter().map(|l| l.rel_stderr.min(1.0)).collect();
    let fit = fit_line(&k, &y, Some(&sig));
    v.geometric_slope = fit.slope;
    v.geometric_slope_stderr = fit.slope_stderr;
    let last = levels.last().expect("at least three levels");
    let c_last = last.ln_contribution.exp();
    let partial: f64 = levels.iter().map(|l| l.ln_contribution.exp()).sum();
    if fit.slope <= -st.delta {
        let q = fit.slope.exp();
        let tail = c_last * q / (1.0 - q);
        if tail < st.tail_fraction * partial {
            v.outcome = finite(levels, tail, tail, seed);
            v.rule = "geometric";
            return v;
        }
        if fit.slope + 3.0 * fit.slope_stderr <= -st.delta {
            v.outcome = finite(levels, tail, tail, seed);
            if let Outcome::Finite(e) = &mut v.outcome {
                e.converged = false;
            }
            v.rule = "geometric-extrapolated";
            return v;
        }
    }
    if fit.slope + 3.0 * fit.slope_stderr >= 0.0 {
        v.outcome = Outcome::Divergent { growth_rate: fit.slope };
        v.rule = "non-decaying";
        return v;
    }
    let a = &levels[levels.len().saturating_sub(st.algebraic_window)..];
    let ls: Vec<f64> = a.iter().map(|l| l.scale().max(f64::MIN_POSITIVE).ln()).collect();
    let y: Vec<f64> = a.iter().map(|l| l.ln_contribution).collect();
    let sig: Vec<f64> = a.iter().map(|l| l.rel_stderr.min(1.0)).collect();
    let afit = fit_line(&ls, &y, Some(&sig));
    let beta = -afit.slope;
    v.algebraic_exponent = Some((beta, afit.slope_stderr));
    if afit.slope_stderr > st.max_exponent_stderr {
        v.rule = "algebraic-unresolved";
        return v;
    }
    if beta - 3.0 * afit.slope_stderr > 1.0 {
        // Σ_{j≥1} C_last (1 + j ln2 / s)^{-β}, by the midpoint integral.
        let s = last.scale();
        let h = std::f64::consts::LN_2 / s;
        let tail = c_last / (h * (beta - 1.0)) * (1.0 + 0.5 * h).powf(1.0 - beta);
        v.outcome = finite(levels, tail, tail, seed);
        v.rule = "algebraic";
        return v;
    }
    v.outcome = Outcome::Divergent { growth_rate: fit.slope };
    v.rule = "algebraic-slow";
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ball(n: usize, r: f64) -> BallSpec {
        BallSpec::new(Point::origin(n), r).unwrap()
    }

    fn synthetic(ln_c: impl Fn(usize) -> f64, rel: f64) -> Vec<LevelContribution> {
        (0..40)
            .map(|k| {
                let outer = 0.5f64.powi(k as i32);
                LevelContribution {
                    level: k,
                    inner: outer / 2.0,
                    outer,
                    ln_contribution: ln_c(k),
                    rel_stderr: rel,
                    samples: 1000,
                }
            })
            .collect()
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((ln_unit_ball(2) - PI.ln()).abs() < 1e-15);
        assert!((ln_unit_ball(4) - (PI * PI / 2.0).ln()).abs() < 1e-15);
        assert!((ln_unit_ball(6) - (PI.powi(3) / 6.0).ln()).abs() < 1e-14);
        // levels tile the ball
        let f = AnnulusFrame::point(&ball(2, 0.7));
        let total: f64 = (0..60).map(|k| f.ln_volume(k).exp()).sum();
        assert!((total - PI * PI / 2.0 * 0.7f64.powi(4)).abs() < 1e-12);
        let t = AnnulusFrame::transverse(&ball(2, 0.7), vec![0]).unwrap();
        let total: f64 = (0..60).map(|k| t.ln_volume(k).exp()).sum();
        assert!((total - (PI * 0.49).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn classifier_rules_on_synthetic_levels() {
        let st = DivergenceSettings::default();
        let geo = classify(synthetic(|k| -0.7 * k as f64, 0.01), 0, &st);
        assert_eq!(geo.rule, "geometric");
        let flat = classify(synthetic(|_| -1.0, 0.01), 0, &st);
        assert!(flat.is_divergent());
        // C_k ~ s^-2 is summable, s^-0.5 is not
        let s = |k: usize| (k as f64 + 1.5) * std::f64::consts::LN_2;
        let alg = classify(synthetic(|k| -2.0 * s(k).ln(), 0.01), 0, &st);
        assert_eq!(alg.rule, "algebraic", "{alg:?}");
        let slow = classify(synthetic(|k| -0.5 * s(k).ln(), 0.01), 0, &st);
        assert!(slow.is_divergent(), "{slow:?}");
        let noisy = classify(synthetic(|_| 0.0, 0.9), 0, &st);
        assert_eq!(noisy.outcome, Outcome::Inconclusive);
        let zero = classify(synthetic(|_| f64::NEG_INFINITY, 0.0), 0, &st);
        assert_eq!(zero.rule, "vanishing");
    }

    #[test]
    fn algebraic_tail_matches_direct_sum() {
        let s = |k: usize| (k as f64 + 1.5) * std::f64::consts::LN_2;
        let v = classify(synthetic(|k| -3.0 * s(k).ln(), 1e-4), 0, &DivergenceSettings::default());
        let Outcome::Finite(e) = v.outcome else { panic!("{v:?}") };
        let direct: f64 = (0..1_000_000).map(|k| s(k).powi(-3)).sum();
        assert!((e.value - direct).abs() < 1e-3 * direct, "{} vs {direct}", e.value);
    }

    /// `∫_{|z|<R} |z|^{-p}` over `C^n` is `2π^n R^{2n-p} / ((n-1)! (2n-p))`.
    #[test]
    fn distance_power_calibration() {
        for n in [1usize, 2, 3] {
            for p in [0.5, 1.0, 1.5, 1.9] {
                let p = p * n as f64;
                let g = Integrand::distance_power(Point::origin(n), p).unwrap();
                let v = integral_with_divergence(&g, &ball(n, 0.5), 4000, 17).unwrap();
                let fact: f64 = (1..n).map(|i| i as f64).product();
                let exact = 2.0 * PI.powi(n as i32) * 0.5f64.powf(2.0 * n as f64 - p)
                    / (fact * (2.0 * n as f64 - p));
                match v.outcome {
                    Outcome::Finite(e) => {
                        assert!((e.value - exact).abs() < 0.02 * exact, "n={n} p={p}: {} vs {exact}", e.value)
                    }
                    o => panic!("n={n} p={p}: {o:?} ({})", v.rule),
                }
            }
            for p in [2.0, 2.3] {
                let g = Integrand::distance_power(Point::origin(n), p * n as f64).unwrap();
                let v = integral_with_divergence(&g, &ball(n, 0.5), 4000, 18).unwrap();
                assert!(v.is_divergent(), "n={n} p={p}: {v:?}");
            }
        }
    }

    #[test]
    fn shifted_constant_scales_the_integral() {
        // f = log|z| - 1, r = 4: g = e^{1/2} |z|^{-1/2}, integral e^{1/2} 2π / (3/2).
        let f = PshExpr::add_const(-1.0, "logabs(poly 1 0)".parse().unwrap()).unwrap();
        let g = Integrand::exp_neg(f, 4.0).unwrap();
        let v = integral_with_divergence(&g, &ball(1, 1.0), 10_000, 5).unwrap();
        let Outcome::Finite(e) = v.outcome else { panic!("{v:?}") };
        let exact = 0.5f64.exp() * 2.0 * PI / 1.5;
        assert!((e.value - exact).abs() < 0.01 * exact, "{} vs {exact}", e.value);
    }

    #[test]
    fn two_pi_example() {
        // |z|^{-1} on the unit disk integrates to 2π.
        let g = Integrand::exp_neg("logabs(poly 1 0)".parse().unwrap(), 2.0).unwrap();
        let v = integral_with_divergence(&g, &ball(1, 1.0), 10_000, 3).unwrap();
        let Outcome::Finite(e) = v.outcome else { panic!("{v:?}") };
        assert!((e.value - 2.0 * PI).abs() < 0.01 * 2.0 * PI, "{e:?}");
    }

    #[test]
    fn line_frame_handles_coordinate_singularity() {
        // |z1|^{-1} on the bidisk-like ball of C^2 is finite, |z1|^{-2} is not.
        let b = ball(2, 0.5);
        let frame = AnnulusFrame::transverse(&b, vec![0]).unwrap();
        let st = DivergenceSettings::default();
        let f = PshExpr::log_abs_coord(2, 0).unwrap();
        let fin = integral_with_divergence_in(&Integrand::exp_neg(f.clone(), 2.0).unwrap(), &frame, 4000, 1, &st)
            .unwrap();
        assert!(fin.is_finite(), "{fin:?}");
        let div = integral_with_divergence_in(&Integrand::exp_neg(f, 1.0).unwrap(), &frame, 4000, 1, &st).unwrap();
        assert!(div.is_divergent(), "{div:?}");
    }

    #[test]
    fn grad_squared_of_log_norm() {
        // |∇ log|z||² = 1/|z|², not integrable at 0 in C ...
        let g = Integrand::GradSquared { f: "logabs(poly 1 0)".parse().unwrap() };
        let v = integral_with_divergence(&g, &ball(1, 0.5), 2000, 4).unwrap();
        assert!(v.is_divergent(), "{v:?}");
        // ... but integrable in C^2, with integral π² R².
        let g = Integrand::GradSquared { f: PshExpr::log_norm(Point::origin(2), None).unwrap() };
        let v = integral_with_divergence(&g, &ball(2, 0.5), 4000, 4).unwrap();
        let Outcome::Finite(e) = v.outcome else { panic!("{v:?}") };
        let exact = PI * PI / 4.0;
        assert!((e.value - exact).abs() < 0.01 * exact, "{} vs {exact}", e.value);
    }

    #[test]
    fn deterministic_levels() {
        let g = Integrand::distance_power(Point::origin(2), 3.0).unwrap();
        let a = integral_with_divergence(&g, &ball(2, 0.5), 5000, 8).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| integral_with_divergence(&g, &ball(2, 0.5), 5000, 8).unwrap());
        assert_eq!(a, b);
    }
}
