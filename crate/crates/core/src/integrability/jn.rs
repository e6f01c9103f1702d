use std::io::Write;

use serde::{Deserialize, Serialize};

use super::IntegrabilityError;
use crate::function_model::PshExpr;
use crate::geometry::BallSpec;
use crate::quadrature::{sampled_values, SupRegion, MIN_BUDGET};
use crate::stats::fit_line;

/// Tail fractions inside which the decay rate is fitted.
pub const FIT_TAILS: (f64, f64) = (1e-4, 1e-1);

/// Exponential-moment check `⨍ exp(c |f - f_B|)` at `c` = half the rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub c: f64,
    pub value: f64,
    pub finite: bool,
}

/// Fraction of ball samples with `|f - f_B| > λ` on a uniform `λ` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JnProfile {
    pub ball: BallSpec,
    pub mean: f64,
    pub lambdas: Vec<f64>,
    pub tail_fraction: Vec<f64>,
    /// Minus the slope of `ln tail` against `λ` over the fit range; `None`
    /// when the deviations are bounded and the tail vanishes before the range.
    pub decay_rate: Option<f64>,
    pub decay_stderr: Option<f64>,
    /// Intercept of the fitted line `ln tail = intercept - rate λ`.
    pub decay_intercept: Option<f64>,
    pub fit_range: Option<(f64, f64)>,
    /// Largest residual of the log-tail fit.
    pub max_residual: Option<f64>,
    pub moment: Option<MomentCheck>,
    pub budget: usize,
    pub seed: u64,
}

impl JnProfile {
    /// Columns `lambda, tail_fraction`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["lambda", "tail_fraction"])?;
        for (l, t) in self.lambdas.iter().zip(&self.tail_fraction) {
            out.write_record([l.to_string(), t.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Builds the tail profile from one sampling pass. With `lambda_max = None`
/// the grid extends to the largest observed deviation.
pub fn jn_profile(
    f: &PshExpr,
    b: &BallSpec,
    lambda_max: Option<f64>,
    steps: usize,
    budget: usize,
    seed: u64,
) -> Result<JnProfile, IntegrabilityError> {
    if budget < MIN_BUDGET {
        return Err(crate::quadrature::QuadratureError::BudgetTooSmall(budget).into());
    }
    let steps = steps.max(2);
    let values = sampled_values(f, b, SupRegion::Ball, budget, seed)?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut dev: Vec<f64> = values.iter().map(|v| (v - mean).abs()).collect();
    dev.sort_by(f64::total_cmp);
    let top = dev.last().copied().unwrap_or(0.0);
    let lmax = lambda_max.unwrap_or(top).max(f64::MIN_POSITIVE);
    let lambdas: Vec<f64> = (0..=steps).map(|i| lmax * i as f64 / steps as f64).collect();
    let tail_fraction: Vec<f64> =
        lambdas.iter().map(|&l| (dev.len() - dev.partition_point(|&d| d <= l)) as f64 / n).collect();
    let (lo, hi) = FIT_TAILS;
    let idx: Vec<usize> = (0..lambdas.len()).filter(|&i| tail_fraction[i] >= lo && tail_fraction[i] <= hi).collect();
    let mut p = JnProfile {
        ball: b.clone(),
        mean,
        lambdas,
        tail_fraction,
        decay_rate: None,
        decay_stderr: None,
        decay_intercept: None,
        fit_range: None,
        max_residual: None,
        moment: None,
        budget,
        seed,
    };
    if idx.len() < 2 {
        // Either bounded deviations (no tail to fit) or a grid too coarse.
        if p.tail_fraction.iter().skip(1).all(|&t| t < lo) {
            return Ok(p);
        }
        return Err(IntegrabilityError::NoFitRange);
    }
    let x: Vec<f64> = idx.iter().map(|&i| p.lambdas[i]).collect();
    let y: Vec<f64> = idx.iter().map(|&i| p.tail_fraction[i].ln()).collect();
    // binomial count noise in log space: sqrt((1 - q) / (q N))
    let sig: Vec<f64> = idx.iter().map(|&i| ((1.0 - p.tail_fraction[i]) / (p.tail_fraction[i] * n)).sqrt()).collect();
    let fit = fit_line(&x, &y, Some(&sig));
    let rate = -fit.slope;
    if rate <= 0.0 {
        return Err(IntegrabilityError::TailTooHeavy(rate));
    }
    p.decay_rate = Some(rate);
    p.decay_stderr = Some(fit.slope_stderr);
    p.decay_intercept = Some(fit.intercept);
    p.fit_range = Some((x[0], x[x.len() - 1]));
    p.max_residual = Some(fit.max_residual);
    // Resum the bins at their right ends, then an exponential tail of rate
    // `rate` past the grid.
    let c = rate / 2.0;
    let (l, t) = (&p.lambdas, &p.tail_fraction);
    let mut value = 1.0 - t[0];
    for i in 0..l.len() - 1 {
        value += (t[i] - t[i + 1]) * (c * l[i + 1]).exp();
    }
    let last = l.len() - 1;
    value += t[last] * (c * l[last]).exp() * rate / (rate - c);
    p.moment = Some(MomentCheck { c, value, finite: value.is_finite() });
    Ok(p)
}
