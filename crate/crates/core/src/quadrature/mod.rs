//! Monte Carlo means, sampled suprema, and dyadic-annulus classification of
//! possibly divergent integrals.

mod divergence;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use divergence::{
    integral_with_divergence, integral_with_divergence_in, AnnulusFrame, DivergenceSettings,
    DivergenceVerdict, Integrand, LevelContribution, Outcome,
};

use crate::function_model::{ModelError, PshExpr};
use crate::geometry::{fill_ball, fill_sphere, BallSpec};
use crate::rng::{map_chunks, substream};
use crate::stats::Moments;

/// Smallest accepted sample budget for means.
pub const MIN_BUDGET: usize = 100;
/// Redraws allowed per sample when a draw lands on the singular set.
pub const MAX_REDRAWS: usize = 100;
/// Refinement rounds of the sampled supremum.
pub const SUP_ROUNDS: usize = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("budget {0} is below the minimum of {MIN_BUDGET}")]
    BudgetTooSmall(usize),
    #[error("{MAX_REDRAWS} consecutive draws hit the singular set")]
    TooManyRedraws,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub budget: usize,
    pub seed: u64,
    pub converged: bool,
}

/// Where a sampled supremum looks for its maximizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupRegion {
    /// The bounding sphere, which suffices by the maximum principle.
    Sphere,
    /// The whole open ball.
    Ball,
}

pub(crate) fn check_dim(f: &PshExpr, n: usize) -> Result<(), ModelError> {
    match f.dim() {
        Some(d) if d != n => Err(ModelError::DimensionMismatch { expected: d, found: n }),
        _ => Ok(()),
    }
}

fn draw(
    rng: &mut ChaCha8Rng,
    b: &BallSpec,
    region: SupRegion,
    x: &mut [f64],
) {
    match region {
        SupRegion::Sphere => fill_sphere(rng, b.center().coords(), b.radius(), x),
        SupRegion::Ball => fill_ball(rng, b.center().coords(), b.radius(), x),
    }
}

/// Value of `f` at a fresh sample, redrawing points of the singular set.
fn finite_sample(
    f: &PshExpr,
    rng: &mut ChaCha8Rng,
    b: &BallSpec,
    region: SupRegion,
    x: &mut [f64],
) -> Result<f64, QuadratureError> {
    for _ in 0..=MAX_REDRAWS {
        draw(rng, b, region, x);
        let v = f.eval_raw(x)?;
        if v > f64::NEG_INFINITY {
            return Ok(v);
        }
    }
    Err(QuadratureError::TooManyRedraws)
}

/// Moments of `map(f(x))` over `count` samples.
pub(crate) fn sampled_moments(
    f: &PshExpr,
    b: &BallSpec,
    region: SupRegion,
    count: usize,
    seed: u64,
    map: impl Fn(f64) -> f64 + Sync,
) -> Result<Moments, QuadratureError> {
    check_dim(f, b.dim())?;
    let parts = map_chunks(count, seed, |rng, range| -> Result<Moments, QuadratureError> {
        let mut m = Moments::default();
        let mut x = vec![0.0; 2 * b.dim()];
        for _ in range {
            m.push(map(finite_sample(f, rng, b, region, &mut x)?));
        }
        Ok(m)
    });
    let parts: Result<Vec<_>, _> = parts.into_iter().collect();
    Ok(Moments::merge_all(parts?))
}

/// Raw values of `f` at `count` samples, in sample order.
pub(crate) fn sampled_values(
    f: &PshExpr,
    b: &BallSpec,
    region: SupRegion,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>, QuadratureError> {
    check_dim(f, b.dim())?;
    let parts = map_chunks(count, seed, |rng, range| -> Result<Vec<f64>, QuadratureError> {
        let mut x = vec![0.0; 2 * b.dim()];
        range.map(|_| finite_sample(f, rng, b, region, &mut x)).collect()
    });
    let mut out = Vec::with_capacity(count);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn mean_estimate(
    f: &PshExpr,
    b: &BallSpec,
    region: SupRegion,
    budget: usize,
    seed: u64,
) -> Result<Estimate, QuadratureError> {
    if budget < MIN_BUDGET {
        return Err(QuadratureError::BudgetTooSmall(budget));
    }
    let m = sampled_moments(f, b, region, budget, seed, |v| v)?;
    let stderr = m.stderr();
    Ok(Estimate { value: m.mean, stderr, budget, seed, converged: stderr.is_finite() })
}

/// Mean of `f` over the sphere bounding `b`.
pub fn mean_on_sphere(f: &PshExpr, b: &BallSpec, budget: usize, seed: u64) -> Result<Estimate, QuadratureError> {
    mean_estimate(f, b, SupRegion::Sphere, budget, seed)
}

/// Mean of `f` over the ball `b`.
pub fn mean_on_ball(f: &PshExpr, b: &BallSpec, budget: usize, seed: u64) -> Result<Estimate, QuadratureError> {
    mean_estimate(f, b, SupRegion::Ball, budget, seed)
}

/// Sampled supremum over the closed ball, searched on the sphere.
pub fn sup_on_ball(f: &PshExpr, b: &BallSpec, budget: usize, seed: u64) -> Result<Estimate, QuadratureError> {
    sup_on_ball_in(f, b, SupRegion::Sphere, budget, seed)
}

#[derive(Clone, Debug)]
struct Best {
    value: f64,
    x: Vec<f64>,
}

fn better(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.value > a.value { b } else { a }),
        (a, b) => a.or(b),
    }
}

/// Sampled supremum: a coarse pass with three quarters of the budget, then
/// [`SUP_ROUNDS`] rounds around the incumbent with the cap shrinking by a
/// factor 4 each round. The reported stderr is the improvement made by the
/// last round. The value is a lower bound for the true supremum.
pub fn sup_on_ball_in(
    f: &PshExpr,
    b: &BallSpec,
    region: SupRegion,
    budget: usize,
    seed: u64,
) -> Result<Estimate, QuadratureError> {
    check_dim(f, b.dim())?;
    let dim = 2 * b.dim();
    let coarse = (budget * 3 / 4).max(1);
    let per_round = ((budget - coarse.min(budget)) / SUP_ROUNDS).max(1);
    let scan = |count: usize, seed: u64, gen: &(dyn Fn(&mut ChaCha8Rng, &mut [f64]) + Sync)| {
        let parts = map_chunks(count, seed, |rng, range| -> Result<Option<Best>, QuadratureError> {
            let mut best: Option<Best> = None;
            let mut x = vec![0.0; dim];
            for _ in range {
                gen(rng, &mut x);
                let v = f.eval_raw(&x)?;
                if v > f64::NEG_INFINITY && best.as_ref().is_none_or(|bb| v > bb.value) {
                    best = Some(Best { value: v, x: x.clone() });
                }
            }
            Ok(best)
        });
        parts.into_iter().try_fold(None, |acc, p| p.map(|p| better(acc, p)))
    };
    let mut best = scan(coarse, substream(seed, 0), &|rng, x| draw(rng, b, region, x))?;
    let mut history = vec![best.as_ref().map_or(f64::NEG_INFINITY, |bb| bb.value)];
    let c = b.center().coords();
    let r = b.radius();
    for round in 0..SUP_ROUNDS {
        let Some(inc) = best.clone() else { break };
        let theta = std::f64::consts::FRAC_PI_4 / 4f64.powi(round as i32);
        let gen = |rng: &mut ChaCha8Rng, x: &mut [f64]| {
            loop {
                for k in 0..dim {
                    let g: f64 = rng.sample(StandardNormal);
                    x[k] = inc.x[k] - c[k] + theta * r * g;
                }
                match region {
                    SupRegion::Sphere => {
                        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                        if n == 0.0 {
                            continue;
                        }
                        x.iter_mut().zip(c).for_each(|(v, ck)| *v = ck + r * *v / n);
                        return;
                    }
                    SupRegion::Ball => {
                        let n2 = x.iter().map(|v| v * v).sum::<f64>();
                        if n2 < r * r {
                            x.iter_mut().zip(c).for_each(|(v, ck)| *v += ck);
                            return;
                        }
                    }
                }
            }
        };
        let found = scan(per_round, substream(seed, 1 + round as u64), &gen)?;
        best = better(best, found);
        history.push(best.as_ref().map_or(f64::NEG_INFINITY, |bb| bb.value));
    }
    let value = *history.last().expect("coarse pass recorded");
    let prev = history[history.len().saturating_sub(2)];
    let gap = if value.is_finite() && prev.is_finite() { value - prev } else { 0.0 };
    Ok(Estimate {
        value,
        stderr: gap,
        budget: coarse + per_round * SUP_ROUNDS,
        seed,
        converged: value.is_finite() && gap <= 1e-3 * (1.0 + value.abs()),
    })
}
