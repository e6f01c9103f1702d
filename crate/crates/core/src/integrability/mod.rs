//! Integrability index by bisection on the divergence classifier, the
//! `ν/n ≤ ι ≤ ν` sandwich, exponential tail profiles and `W^{1,2}` checks.

mod jn;
mod kappa;

use serde::{Deserialize, Serialize};

pub use jn::{jn_profile, JnProfile, MomentCheck, FIT_TAILS};
pub use kappa::{kappa_numeric, kappa_transform, EtaKind, EtaSpec};

use crate::function_model::{ModelError, Point, PshExpr};
use crate::geometry::{BallSpec, GeometryError};
use crate::lelong::{lelong_at, LelongError, RadiusGrid};
use crate::quadrature::{
    check_dim, integral_with_divergence_in, sup_on_ball, AnnulusFrame, DivergenceSettings, DivergenceVerdict,
    Integrand, Outcome, QuadratureError,
};
use crate::rng::{substream, substream_path};

/// Largest ball radius used around the point.
pub const MAX_PROBE_RADIUS: f64 = 0.1;
/// A flat counts as passing through a point within this distance.
const ON_FLAT: f64 = 1e-12;
/// Samples spent on the normalizing supremum.
const SHIFT_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegrabilityError {
    #[error("invalid weight: {0}")]
    InvalidEta(String),
    #[error("t = {t} is below gamma = {gamma}")]
    EtaDomain { t: f64, gamma: f64 },
    #[error("window [{lo}, {hi}] does not bracket the index: the upper end is not integrable")]
    Window { lo: f64, hi: f64 },
    #[error("probe at r = {0} stayed inconclusive after doubling the budget")]
    Inconclusive(f64),
    #[error("invalid options: {0}")]
    BadOptions(String),
    #[error("tail fraction never enters the fit range")]
    NoFitRange,
    #[error("tail does not decay (fitted rate {0})")]
    TailTooHeavy(f64),
    #[error("singular set is not a single coordinate flat near the region")]
    UnsupportedSingularSet,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Lelong(#[from] LelongError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Settings of [`integrability_index`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IotaOptions {
    pub window: (f64, f64),
    pub tol: f64,
    pub levels: usize,
    pub budget_per_level: usize,
    /// Distance to the boundary of the region where `f` is defined; the
    /// ball radius is the smaller of this and [`MAX_PROBE_RADIUS`].
    pub margin: f64,
}

impl Default for IotaOptions {
    fn default() -> Self {
        IotaOptions { window: (0.05, 4.0), tol: 0.05, levels: 400, budget_per_level: 10_000, margin: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IotaProbe {
    pub r: f64,
    pub budget_per_level: usize,
    pub outcome: &'static str,
    pub rule: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IotaResult {
    pub iota: f64,
    /// Final bracket `[lo, hi]`; `ι` is its midpoint.
    pub bracket: (f64, f64),
    pub half_width: f64,
    /// How the value was settled: `finite-value`, `below-window` or `bisection`.
    pub method: &'static str,
    pub radius: f64,
    /// Transverse coordinates of the annuli.
    pub transverse: Vec<usize>,
    pub shift: f64,
    pub probes: Vec<IotaProbe>,
    pub seed: u64,
}

fn outcome_label(o: &Outcome) -> &'static str {
    match o {
        Outcome::Finite(_) => "finite",
        Outcome::Divergent { .. } => "divergent",
        Outcome::Inconclusive => "inconclusive",
    }
}

/// Annuli around `a`, transverse to the single flat of the singular set
/// through `a` when there is exactly one, around the point otherwise.
fn frame_at(f: &PshExpr, b: &BallSpec) -> Result<AnnulusFrame, ModelError> {
    let x = b.center().coords();
    let through: Vec<_> = f
        .singular_set()
        .flats(b.dim())
        .unwrap_or_default()
        .into_iter()
        .filter(|fl| fl.distance(x) <= ON_FLAT)
        .collect();
    match through.as_slice() {
        [fl] => AnnulusFrame::transverse(b, fl.coords.clone()),
        _ => Ok(AnnulusFrame::point(b)),
    }
}

/// `ι_f(a) = inf{r > 0 : e^{-2f/r} integrable near a}` by bisection over
/// `opts.window`. A finite value at `a`, or an integrable lower window end,
/// gives `ι = 0` with the bracket `[0, r_lo]`.
pub fn integrability_index(
    f: &PshExpr,
    a: &Point,
    opts: &IotaOptions,
    seed: u64,
) -> Result<IotaResult, IntegrabilityError> {
    let (lo0, hi0) = opts.window;
    if !(lo0 > 0.0 && hi0 > lo0 && hi0.is_finite() && opts.tol > 0.0 && opts.margin > 0.0) {
        return Err(IntegrabilityError::BadOptions(format!("window {:?}, tol {}, margin {}", opts.window, opts.tol, opts.margin)));
    }
    check_dim(f, a.dim())?;
    let radius = opts.margin.min(MAX_PROBE_RADIUS);
    let b = BallSpec::new(a.clone(), radius)?;
    let mut out = IotaResult {
        iota: 0.0,
        bracket: (0.0, 0.0),
        half_width: 0.0,
        method: "finite-value",
        radius,
        transverse: Vec::new(),
        shift: 0.0,
        probes: Vec::new(),
        seed,
    };
    if f.eval(a)?.finite().is_some() {
        return Ok(out);
    }
    // ι is unchanged by constants; put the integrand below 1 on the ball.
    let shift = sup_on_ball(f, &b, SHIFT_BUDGET, substream(seed, 0))?.value + 1.0;
    let g = PshExpr::add_const(-shift, f.clone())?;
    let frame = frame_at(f, &b)?;
    out.shift = shift;
    out.transverse = frame.transverse_coords().to_vec();
    let settings = DivergenceSettings { levels: opts.levels, ..DivergenceSettings::default() };

    let mut probe = |r: f64, idx: u64| -> Result<bool, IntegrabilityError> {
        let integrand = Integrand::exp_neg(g.clone(), r)?;
        let mut budget = opts.budget_per_level;
        for attempt in 0..2 {
            let v = integral_with_divergence_in(&integrand, &frame, budget, substream_path(seed, &[1, idx, attempt]), &settings)?;
            out.probes.push(IotaProbe { r, budget_per_level: budget, outcome: outcome_label(&v.outcome), rule: v.rule });
            match v.outcome {
                Outcome::Finite(_) => return Ok(true),
                Outcome::Divergent { .. } => return Ok(false),
                Outcome::Inconclusive => budget *= 2,
            }
        }
        Err(IntegrabilityError::Inconclusive(r))
    };

    if probe(lo0, 0)? {
        out.method = "below-window";
        out.bracket = (0.0, lo0);
    } else if !probe(hi0, 1)? {
        return Err(IntegrabilityError::Window { lo: lo0, hi: hi0 });
    } else {
        let (mut lo, mut hi) = (lo0, hi0);
        let mut idx = 2;
        while hi - lo > opts.tol {
            let mid = 0.5 * (lo + hi);
            if probe(mid, idx)? {
                hi = mid;
            } else {
                lo = mid;
            }
            idx += 1;
        }
        out.method = "bisection";
        out.bracket = (lo, hi);
    }
    out.iota = 0.5 * (out.bracket.0 + out.bracket.1);
    out.half_width = 0.5 * (out.bracket.1 - out.bracket.0);
    Ok(out)
}

/// Which ends of `ν/n ≤ ι ≤ ν` the estimate sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TightEnd {
    Lower,
    Upper,
    Both,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkodaReport {
    pub nu: f64,
    pub nu_spread: f64,
    pub iota: IotaResult,
    pub lower: f64,
    pub upper: f64,
    pub slack: f64,
    pub pass: bool,
    pub tight: TightEnd,
}

/// Relative tolerance on the sandwich, before propagated terms.
pub const SKODA_RELATIVE_SLACK: f64 = 0.05;

/// Lelong number and integrability index at `a`, checked against
/// `ν/n ≤ ι ≤ ν`.
pub fn skoda_report(
    f: &PshExpr,
    a: &Point,
    grid: &RadiusGrid,
    lelong_budget: usize,
    opts: &IotaOptions,
    seed: u64,
) -> Result<SkodaReport, IntegrabilityError> {
    let lel = lelong_at(f, a, grid, lelong_budget, substream(seed, 0))?;
    let iota = integrability_index(f, a, opts, substream(seed, 1))?;
    let nu = lel.consensus;
    let n = a.dim() as f64;
    let (lower, upper) = (nu / n, nu);
    let slack = SKODA_RELATIVE_SLACK * nu.max(1.0) + iota.half_width + lel.spread;
    let i = iota.iota;
    let pass = lower - slack <= i && i <= upper + slack;
    let tight = match ((i - lower).abs() <= slack, (i - upper).abs() <= slack) {
        (true, true) => TightEnd::Both,
        (true, false) => TightEnd::Lower,
        (false, true) => TightEnd::Upper,
        (false, false) => TightEnd::Neither,
    };
    Ok(SkodaReport { nu, nu_spread: lel.spread, iota, lower, upper, slack, pass, tight })
}

/// `∫_B |∇f|²` through the divergence classifier. With one singular flat
/// meeting the ball the annuli are transverse to it, centered at the
/// projection of the ball center.
pub fn sobolev_check(
    f: &PshExpr,
    region: &BallSpec,
    budget_per_level: usize,
    levels: usize,
    seed: u64,
) -> Result<DivergenceVerdict, IntegrabilityError> {
    check_dim(f, region.dim())?;
    let x = region.center().coords();
    let flats = f.pole_set().flats(region.dim()).ok_or(IntegrabilityError::UnsupportedSingularSet)?;
    let near: Vec<_> = flats.into_iter().filter(|fl| fl.distance(x) < region.radius()).collect();
    let frame = match near.as_slice() {
        [] => AnnulusFrame::point(region),
        [fl] => {
            let c = Point::new(fl.project(x))?;
            AnnulusFrame::transverse(&BallSpec::new(c, region.radius())?, fl.coords.clone())?
        }
        _ => return Err(IntegrabilityError::UnsupportedSingularSet),
    };
    let settings = DivergenceSettings { levels, ..DivergenceSettings::default() };
    let g = Integrand::GradSquared { f: f.clone() };
    Ok(integral_with_divergence_in(&g, &frame, budget_per_level, seed, &settings)?)
}
