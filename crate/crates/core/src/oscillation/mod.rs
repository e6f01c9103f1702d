//! Mean and upper oscillation on balls, sampled BMO norms and VMO profiles,
//! and the inequality checks behind the oscillation estimates.

mod checks;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use checks::{
    barycenter_check, decomposition_check, decomposition_constant, harnack_check, BarycenterVerdict,
    DecompositionReport, HarnackRow, HarnackVerdict, Probes, SupUsage,
};

use crate::function_model::{distance, Point, PshExpr};
use crate::geometry::{BallSpec, Domain, GeometryError};
use crate::quadrature::{
    mean_on_ball, sampled_moments, sup_on_ball, Estimate, QuadratureError, SupRegion,
};
use crate::rng::{substream, substream_path};

/// Multiplier on combined standard errors in every inequality check.
pub const SLACK_SIGMAS: f64 = 3.0;
/// Default number of centers for profiles and BMO scans.
pub const DEFAULT_CENTERS: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OscillationError {
    #[error("no admissible ball: every sampled center lies on the boundary")]
    EmptyFamily,
    #[error("radii must be positive and strictly decreasing")]
    BadRadii,
    #[error("the function is not below zero on the closed ball: sampled sup {sup} (gap {gap})")]
    NotNonPositive { sup: f64, gap: f64 },
    #[error("probe outside the ball")]
    ProbeOutside,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Mean oscillation `⨍_B |f - f_B|`, two passes on independent substreams.
pub fn mo(f: &PshExpr, b: &BallSpec, budget: usize, seed: u64) -> Result<Estimate, QuadratureError> {
    let first = mean_on_ball(f, b, budget, substream(seed, 0))?;
    let m = first.value;
    let dev = sampled_moments(f, b, SupRegion::Ball, budget, substream(seed, 1), |v| (v - m).abs())?;
    // |d/dm ⨍|f - m|| <= 1, so the first pass adds at most its own stderr.
    let stderr = (dev.stderr().powi(2) + first.stderr.powi(2)).sqrt();
    Ok(Estimate { value: dev.mean, stderr, budget: 2 * budget, seed, converged: stderr.is_finite() })
}

/// Upper oscillation `sup_B f - f_B`. The stderr adds the sup gap.
pub fn uo(f: &PshExpr, b: &BallSpec, budget: usize, seed: u64) -> Result<Estimate, QuadratureError> {
    let s = sup_on_ball(f, b, budget, substream(seed, 0))?;
    let m = mean_on_ball(f, b, budget, substream(seed, 1))?;
    let stderr = (m.stderr.powi(2) + s.stderr.powi(2)).sqrt();
    Ok(Estimate {
        value: s.value - m.value,
        stderr,
        budget: s.budget + m.budget,
        seed,
        converged: s.converged && m.converged,
    })
}

/// Interleaves `targeted` and `uniform` centers, targeted first.
fn interleave(targeted: Vec<Point>, uniform: Vec<Point>, count: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(count);
    let mut t = targeted.into_iter();
    let mut u = uniform.into_iter();
    while out.len() < count {
        let before = out.len();
        out.extend(t.next());
        if out.len() < count {
            out.extend(u.next());
        }
        if out.len() == before {
            break;
        }
    }
    out
}

/// Centers for oscillation scans, half uniform in the domain and half
/// targeted: interior poles of `f`, then points approaching
/// boundary features and poles geometrically from the anchor.
/// Any prefix of the output is the output for a smaller `count`.
pub fn oscillation_centers(f: &PshExpr, d: &Domain, count: usize, seed: u64) -> Vec<Point> {
    let anchor = d.anchor();
    let mut bases = vec![anchor.coords().to_vec()];
    bases.extend(d.features().iter().map(|p| p.coords().to_vec()));
    let mut targets: Vec<Vec<f64>> = d.features().iter().map(|p| p.coords().to_vec()).collect();
    for c in f.pole_set().candidates(&bases) {
        if d.in_closure(&c) && targets.iter().all(|t| distance(t, &c) > 1e-9) {
            targets.push(c);
        }
    }
    if targets.is_empty() {
        targets = d.sample_boundary(4, substream(seed, 2)).into_iter().map(|p| p.coords().to_vec()).collect();
    }
    let half = count.div_ceil(2);
    let mut targeted: Vec<Point> = targets
        .iter()
        .filter(|t| d.contains(t))
        .map(|t| Point::from_raw(t.clone()))
        .collect();
    let mut k = 1;
    while targeted.len() < half && k < 60 {
        for t in &targets {
            let s = 0.5f64.powi(k);
            let x: Vec<f64> = t.iter().zip(anchor.coords()).map(|(p, a)| p + s * (a - p)).collect();
            if d.contains(&x) && targeted.iter().all(|q| distance(q.coords(), &x) > 0.0) {
                targeted.push(Point::from_raw(x));
            }
        }
        k += 1;
    }
    targeted.truncate(half);
    let uniform = d.sample_interior(count, substream(seed, 1));
    interleave(targeted, uniform, count)
}

/// Sampled BMO norm: the largest `mo` found, with its ball.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BmoEstimate {
    pub value: Estimate,
    pub argmax: BallSpec,
    /// Always true: a sampled maximum bounds the norm from below.
    pub lower_bound: bool,
    pub balls: usize,
}

fn admissible(d: &Domain, c: &Point, r: f64) -> Result<Option<BallSpec>, OscillationError> {
    let dist = d.dist_to_boundary(c)?;
    let rr = r.min(0.5 * dist);
    if rr <= 0.0 {
        return Ok(None);
    }
    Ok(Some(BallSpec::new(c.clone(), rr)?))
}

fn check_radii(radii: &[f64]) -> Result<(), OscillationError> {
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(OscillationError::BadRadii);
    }
    Ok(())
}

/// Largest `mo` over admissible balls `B(c, min(r, dist/2))`.
pub fn bmo_norm(
    f: &PshExpr,
    d: &Domain,
    center_budget: usize,
    radius_grid: &[f64],
    budget: usize,
    seed: u64,
) -> Result<BmoEstimate, OscillationError> {
    check_radii(radius_grid)?;
    let centers = oscillation_centers(f, d, center_budget, substream(seed, 0));
    let mut best: Option<(Estimate, BallSpec)> = None;
    let mut balls = 0;
    for (i, c) in centers.iter().enumerate() {
        for (j, &r) in radius_grid.iter().enumerate() {
            let Some(b) = admissible(d, c, r)? else { continue };
            balls += 1;
            let e = mo(f, &b, budget, substream_path(seed, &[1, i as u64, j as u64]))?;
            if best.as_ref().is_none_or(|(v, _)| e.value > v.value) {
                best = Some((e, b));
            }
        }
    }
    let (value, argmax) = best.ok_or(OscillationError::EmptyFamily)?;
    Ok(BmoEstimate { value, argmax, lower_bound: true, balls })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub center_index: usize,
    pub radius_index: usize,
    pub center: Point,
    /// `min(r, dist/2)`.
    pub radius_used: f64,
    pub mo: f64,
    pub stderr: f64,
}

/// Worst sampled mean oscillation per radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationProfile {
    pub radii: Vec<f64>,
    pub worst_mo: Vec<f64>,
    pub stderr: Vec<f64>,
    pub argmax: Vec<Point>,
    pub rows: Vec<ProfileRow>,
}

impl OscillationProfile {
    /// Columns `r, worst_mo, stderr, x0, x1, ...` for the argmax center.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        let dim = self.argmax.first().map_or(0, |p| p.coords().len());
        let mut header = vec!["r".to_string(), "worst_mo".into(), "stderr".into()];
        header.extend((0..dim).map(|k| format!("x{k}")));
        out.write_record(&header)?;
        for k in 0..self.radii.len() {
            let mut row = vec![self.radii[k].to_string(), self.worst_mo[k].to_string(), self.stderr[k].to_string()];
            row.extend(self.argmax[k].coords().iter().map(|v| v.to_string()));
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Whether `worst_mo` never rises by more than `sigmas` combined stderr
    /// from one radius to the next smaller one.
    pub fn nonincreasing_within(&self, sigmas: f64) -> bool {
        (1..self.worst_mo.len()).all(|k| {
            let s = (self.stderr[k].powi(2) + self.stderr[k - 1].powi(2)).sqrt();
            self.worst_mo[k] <= self.worst_mo[k - 1] + sigmas * s
        })
    }
}

/// Worst `mo` over the sampled centers at each radius of a decreasing grid.
pub fn vmo_modulus(
    f: &PshExpr,
    d: &Domain,
    radii: &[f64],
    center_budget: usize,
    budget: usize,
    seed: u64,
) -> Result<OscillationProfile, OscillationError> {
    check_radii(radii)?;
    let centers = oscillation_centers(f, d, center_budget, substream(seed, 0));
    let mut p = OscillationProfile {
        radii: radii.to_vec(),
        worst_mo: Vec::new(),
        stderr: Vec::new(),
        argmax: Vec::new(),
        rows: Vec::new(),
    };
    for (j, &r) in radii.iter().enumerate() {
        let mut best: Option<(f64, f64, Point)> = None;
        for (i, c) in centers.iter().enumerate() {
            let Some(b) = admissible(d, c, r)? else { continue };
            let e = mo(f, &b, budget, substream_path(seed, &[1, i as u64, j as u64]))?;
            if best.as_ref().is_none_or(|(v, _, _)| e.value > *v) {
                best = Some((e.value, e.stderr, c.clone()));
            }
            p.rows.push(ProfileRow {
                center_index: i,
                radius_index: j,
                center: c.clone(),
                radius_used: b.radius(),
                mo: e.value,
                stderr: e.stderr,
            });
        }
        let (v, s, c) = best.ok_or(OscillationError::EmptyFamily)?;
        p.worst_mo.push(v);
        p.stderr.push(s);
        p.argmax.push(c);
    }
    Ok(p)
}
