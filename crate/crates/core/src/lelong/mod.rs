//! Lelong numbers from the slopes of sphere means, ball means and suprema
//! against `log r`, and their supremum over the closure of a domain.

mod slope;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use slope::{SlopeFit, WINDOW_FRACTION};

use crate::function_model::{ModelError, Point, PshExpr};
use crate::geometry::{BallSpec, Domain, GeometryError};
use crate::quadrature::{mean_on_ball, mean_on_sphere, sup_on_ball, QuadratureError};
use crate::rng::{substream, substream_path};
use crate::stats::median3;

/// Smallest radius any grid may reach.
pub const MIN_RADIUS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LelongError {
    #[error("invalid radius grid: {0}")]
    BadGrid(String),
    #[error("no admissible center in the closure")]
    NoCenters,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Radii `r0 q^k`, `k = 0..m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusGrid {
    r0: f64,
    q: f64,
    m: usize,
}

impl Default for RadiusGrid {
    fn default() -> Self {
        RadiusGrid { r0: 0.1, q: 10f64.powf(-0.5), m: 9 }
    }
}

impl RadiusGrid {
    pub fn new(r0: f64, q: f64, m: usize) -> Result<Self, LelongError> {
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(LelongError::BadGrid(format!("r0 = {r0}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(LelongError::BadGrid(format!("ratio {q} not in (0, 1)")));
        }
        if m < 4 {
            return Err(LelongError::BadGrid(format!("{m} radii, need at least 4")));
        }
        let g = RadiusGrid { r0, q, m };
        let last = g.radii()[m - 1];
        if last < MIN_RADIUS {
            return Err(LelongError::BadGrid(format!("smallest radius {last:e} below {MIN_RADIUS:e}")));
        }
        Ok(g)
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn ratio(&self) -> f64 {
        self.q
    }

    pub fn count(&self) -> usize {
        self.m
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.m).map(|k| self.r0 * self.q.powi(k as i32)).collect()
    }
}

/// The three slope fits at one point and their consensus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LelongEstimate {
    pub center: Point,
    pub sphere_mean: SlopeFit,
    pub ball_mean: SlopeFit,
    pub sup: SlopeFit,
    /// Median of the three limits.
    pub consensus: f64,
    /// Largest pairwise difference of the three limits.
    pub spread: f64,
    pub budget: usize,
    pub seed: u64,
}

impl LelongEstimate {
    pub fn fits(&self) -> [(&'static str, &SlopeFit); 3] {
        [("sphere_mean", &self.sphere_mean), ("ball_mean", &self.ball_mean), ("sup", &self.sup)]
    }

    /// Per-radius table: `t, sphere_mean, sphere_stderr, ball_mean,
    /// ball_stderr, sup, sup_stderr`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "sphere_mean", "sphere_stderr", "ball_mean", "ball_stderr", "sup", "sup_stderr"])?;
        for k in 0..self.sup.t.len() {
            let row = [
                self.sup.t[k],
                self.sphere_mean.values[k],
                self.sphere_mean.stderr[k],
                self.ball_mean.values[k],
                self.ball_mean.stderr[k],
                self.sup.values[k],
                self.sup.stderr[k],
            ];
            out.write_record(row.iter().map(|v| v.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Lelong number of `f` at `a`. The three estimators use their own substream
/// at every radius, shared across radii.
pub fn lelong_at(
    f: &PshExpr,
    a: &Point,
    grid: &RadiusGrid,
    budget: usize,
    seed: u64,
) -> Result<LelongEstimate, LelongError> {
    let radii = grid.radii();
    let mut cols: [(Vec<f64>, Vec<f64>); 3] = Default::default();
    for &r in &radii {
        let b = BallSpec::new(a.clone(), r)?;
        let ests = [
            mean_on_sphere(f, &b, budget, substream_path(seed, &[0]))?,
            mean_on_ball(f, &b, budget, substream_path(seed, &[1]))?,
            sup_on_ball(f, &b, budget, substream_path(seed, &[2]))?,
        ];
        for (col, e) in cols.iter_mut().zip(ests) {
            col.0.push(e.value);
            col.1.push(e.stderr);
        }
    }
    let t: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let [s, b, u] = cols.map(|(v, e)| SlopeFit::new(t.clone(), v, e));
    let (x, y, z) = (s.limit, b.limit, u.limit);
    let spread = (x - y).abs().max((x - z).abs()).max((y - z).abs());
    Ok(LelongEstimate {
        center: a.clone(),
        consensus: median3(x, y, z),
        spread,
        sphere_mean: s,
        ball_mean: b,
        sup: u,
        budget,
        seed,
    })
}

/// Data-quality reading of a fit built from a psh source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeDiagnostics {
    pub monotone_nondecreasing: bool,
    pub midpoint_convex: bool,
    pub max_residual: f64,
    /// Human-readable descriptions of the failed properties.
    pub violations: Vec<String>,
}

impl SlopeDiagnostics {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks monotonicity and convexity in `log r` within 3 stderr. A failure
/// points at the quadrature, not at the function.
pub fn slope_diagnostics(fit: &SlopeFit) -> SlopeDiagnostics {
    let mut violations = Vec::new();
    if !fit.monotone_nondecreasing {
        violations.push("ordinates decrease with log r beyond 3 stderr".to_string());
    }
    if !fit.midpoint_convex {
        violations.push("ordinates are not convex in log r within 3 stderr".to_string());
    }
    SlopeDiagnostics {
        monotone_nondecreasing: fit.monotone_nondecreasing,
        midpoint_convex: fit.midpoint_convex,
        max_residual: fit.max_residual,
        violations,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterSource {
    Singular,
    Feature,
    Interior,
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterRow {
    pub center: Point,
    pub source: CenterSource,
    pub consensus: Option<f64>,
    pub spread: Option<f64>,
    /// Why the center was skipped, e.g. `f` is not defined on its grid balls.
    pub refused: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformLelong {
    pub value: f64,
    pub argmax: Point,
    pub spread: f64,
    pub rows: Vec<CenterRow>,
}

/// Candidate points of the pole set in the closure of `d`; a bounded
/// composition can only carry Lelong mass where its inner function does.
fn singular_candidates(f: &PshExpr, d: &Domain, seed: u64) -> Vec<Point> {
    let mut bases: Vec<Vec<f64>> = vec![d.anchor().coords().to_vec()];
    bases.extend(d.features().iter().map(|p| p.coords().to_vec()));
    bases.extend(d.sample_interior(8, seed).iter().map(|p| p.coords().to_vec()));
    let mut out: Vec<Point> = Vec::new();
    for c in f.pole_set().candidates(&bases) {
        if !d.in_closure(&c) || c.iter().any(|v| !v.is_finite()) {
            continue;
        }
        if out.iter().all(|p| crate::function_model::distance(p.coords(), &c) > 1e-9) {
            out.push(Point::from_raw(c));
        }
    }
    out
}

/// `sup` of the Lelong number over the closure of `d`: every singular
/// candidate in the closure, then a filler of interior and boundary points
/// up to `center_budget` centers. Centers where `f` fails to evaluate on the
/// grid balls are refused and listed.
pub fn lelong_uniform(
    f: &PshExpr,
    d: &Domain,
    center_budget: usize,
    grid: &RadiusGrid,
    budget: usize,
    seed: u64,
) -> Result<UniformLelong, LelongError> {
    let mut centers: Vec<(Point, CenterSource)> = singular_candidates(f, d, substream(seed, 0))
        .into_iter()
        .map(|p| (p, CenterSource::Singular))
        .collect();
    for p in d.features() {
        if centers.iter().all(|(c, _)| c.distance(&p) > 1e-9) {
            centers.push((p, CenterSource::Feature));
        }
    }
    let filler = center_budget.saturating_sub(centers.len());
    let inner = filler.div_ceil(2);
    centers.extend(d.sample_interior(inner, substream(seed, 1)).into_iter().map(|p| (p, CenterSource::Interior)));
    centers.extend(
        d.sample_boundary(filler - inner, substream(seed, 2)).into_iter().map(|p| (p, CenterSource::Boundary)),
    );
    let mut rows = Vec::with_capacity(centers.len());
    let mut best: Option<(f64, f64, Point)> = None;
    for (i, (c, source)) in centers.into_iter().enumerate() {
        match lelong_at(f, &c, grid, budget, substream_path(seed, &[3, i as u64])) {
            Ok(e) => {
                if best.as_ref().is_none_or(|b| e.consensus > b.0) {
                    best = Some((e.consensus, e.spread, c.clone()));
                }
                rows.push(CenterRow {
                    center: c,
                    source,
                    consensus: Some(e.consensus),
                    spread: Some(e.spread),
                    refused: None,
                });
            }
            Err(LelongError::Quadrature(QuadratureError::Model(e @ ModelError::DomainViolation { .. }))) => {
                rows.push(CenterRow { center: c, source, consensus: None, spread: None, refused: Some(e.to_string()) })
            }
            Err(e) => return Err(e),
        }
    }
    let (value, spread, argmax) = best.ok_or(LelongError::NoCenters)?;
    Ok(UniformLelong { value, argmax, spread, rows })
}
