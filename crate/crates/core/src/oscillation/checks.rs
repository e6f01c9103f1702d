use serde::Serialize;

use super::{mo, OscillationError, SLACK_SIGMAS};
use crate::function_model::{Point, PshExpr};
use crate::geometry::{sample_ball, BallSpec};
use crate::quadrature::{mean_on_ball, mean_on_sphere, sup_on_ball, Estimate};
use crate::rng::substream;

/// How a check consumed a sampled supremum, which is only a lower bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupUsage {
    pub quantity: String,
    pub gap: f64,
    pub effect: String,
}

/// `3^{2n-1} / 2^{2n-2}`.
pub fn decomposition_constant(n: usize) -> f64 {
    let n = n as i32;
    3f64.powi(2 * n - 1) / 2f64.powi(2 * n - 2)
}

/// Terms of the bound of `MO_B` by sup and sphere-mean increments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub ball: BallSpec,
    pub n: usize,
    pub constant: f64,
    pub mo: Estimate,
    pub uo: f64,
    /// `sup_B f - f_{∂B}`.
    pub i1: f64,
    /// `f_{∂B} - f_B`.
    pub i2: f64,
    pub sup_r: Estimate,
    pub sup_half: Estimate,
    pub sphere_r: Estimate,
    pub sphere_inner: Estimate,
    pub ball_mean: Estimate,
    pub rhs: f64,
    pub slack: f64,
    /// `rhs + slack - mo`.
    pub margin: f64,
    pub passed: bool,
    pub sup_usage: Vec<SupUsage>,
}

/// Checks `MO_B(f) ≤ 2K (sup_{B_r} f - sup_{B_{r/2}} f) + 2 (f_{∂B_r} -
/// f_{∂B_ρ})` with `ρ = e^{-1/(2n)} r` and `K` from
/// [`decomposition_constant`].
pub fn decomposition_check(
    f: &PshExpr,
    b: &BallSpec,
    budget: usize,
    seed: u64,
) -> Result<DecompositionReport, OscillationError> {
    let n = b.dim();
    let k = decomposition_constant(n);
    let r = b.radius();
    let half = b.with_radius(r / 2.0)?;
    let inner = b.with_radius(r * (-1.0 / (2.0 * n as f64)).exp())?;
    let mo_e = mo(f, b, budget, substream(seed, 0))?;
    let sup_r = sup_on_ball(f, b, budget, substream(seed, 1))?;
    let sup_half = sup_on_ball(f, &half, budget, substream(seed, 2))?;
    let sphere_r = mean_on_sphere(f, b, budget, substream(seed, 3))?;
    let sphere_inner = mean_on_sphere(f, &inner, budget, substream(seed, 4))?;
    let ball_mean = mean_on_ball(f, b, budget, substream(seed, 5))?;
    let rhs = 2.0 * k * (sup_r.value - sup_half.value) + 2.0 * (sphere_r.value - sphere_inner.value);
    let combined =
        (mo_e.stderr.powi(2) + 4.0 * sphere_r.stderr.powi(2) + 4.0 * sphere_inner.stderr.powi(2)).sqrt();
    let slack = SLACK_SIGMAS * combined + 2.0 * k * sup_r.stderr;
    let margin = rhs + slack - mo_e.value;
    let i1 = sup_r.value - sphere_r.value;
    let i2 = sphere_r.value - ball_mean.value;
    Ok(DecompositionReport {
        ball: b.clone(),
        n,
        constant: k,
        uo: i1 + i2,
        i1,
        i2,
        rhs,
        slack,
        margin,
        passed: margin >= 0.0,
        sup_usage: vec![
            SupUsage {
                quantity: "sup over B(a, r)".into(),
                gap: sup_r.stderr,
                effect: "lower bound entering with + sign; slack widened by 2K times the gap".into(),
            },
            SupUsage {
                quantity: "sup over B(a, r/2)".into(),
                gap: sup_half.stderr,
                effect: "lower bound entering with - sign; rhs may be overstated by the deficit".into(),
            },
        ],
        mo: mo_e,
        sup_r,
        sup_half,
        sphere_r,
        sphere_inner,
        ball_mean,
    })
}

/// Probe points for [`harnack_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum Probes {
    Random(usize),
    Points(Vec<Point>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnackRow {
    pub x: Point,
    pub lhs: f64,
    pub kernel: f64,
    pub rhs: f64,
    pub slack: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnackVerdict {
    pub sup: Estimate,
    pub sphere_mean: Estimate,
    pub rows: Vec<HarnackRow>,
    pub passed: bool,
}

/// For `f ≤ 0` on the closed ball, checks `f(x) ≤ K(x) ⨍_{∂B} f` with
/// `K(x) = r^{2n-2} (r - |x|) / (r + |x|)^{2n-1}`, `|x|` measured from the
/// center.
pub fn harnack_check(
    f: &PshExpr,
    b: &BallSpec,
    probes: &Probes,
    budget: usize,
    seed: u64,
) -> Result<HarnackVerdict, OscillationError> {
    let sup = sup_on_ball(f, b, budget, substream(seed, 0))?;
    if sup.value > SLACK_SIGMAS * sup.stderr {
        return Err(OscillationError::NotNonPositive { sup: sup.value, gap: sup.stderr });
    }
    let sphere_mean = mean_on_sphere(f, b, budget, substream(seed, 1))?;
    let points = match probes {
        Probes::Random(count) => sample_ball(b, *count, substream(seed, 2)),
        Probes::Points(p) => p.clone(),
    };
    let n = b.dim() as i32;
    let r = b.radius();
    let mut rows = Vec::with_capacity(points.len());
    for x in points {
        if x.dim() != b.dim() {
            return Err(OscillationError::ProbeOutside);
        }
        let rho = x.distance(b.center());
        if rho >= r {
            return Err(OscillationError::ProbeOutside);
        }
        let kernel = r.powi(2 * n - 2) * (r - rho) / (r + rho).powi(2 * n - 1);
        let lhs = f.eval(&x).map_err(crate::quadrature::QuadratureError::from)?.value();
        let rhs = kernel * sphere_mean.value;
        let slack = SLACK_SIGMAS * kernel * sphere_mean.stderr;
        rows.push(HarnackRow { x, lhs, kernel, rhs, slack, passed: lhs <= rhs + slack });
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(HarnackVerdict { sup, sphere_mean, rows, passed })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarycenterVerdict {
    pub ball_mean: Estimate,
    /// Sphere mean at radius `e^{-1/(2n)} r`.
    pub inner_sphere_mean: Estimate,
    pub slack: f64,
    /// `ball_mean - inner_sphere_mean + slack`.
    pub margin: f64,
    pub passed: bool,
}

/// Checks `f_B ≥ f_{∂B(a, e^{-1/(2n)} r)}`: the ball mean averages the
/// sphere means, which are convex in `log r`, against a measure with
/// barycenter `-1/(2n)`.
pub fn barycenter_check(
    f: &PshExpr,
    b: &BallSpec,
    budget: usize,
    seed: u64,
) -> Result<BarycenterVerdict, OscillationError> {
    let n = b.dim() as f64;
    let inner = b.with_radius(b.radius() * (-1.0 / (2.0 * n)).exp())?;
    let ball_mean = mean_on_ball(f, b, budget, substream(seed, 0))?;
    let inner_sphere_mean = mean_on_sphere(f, &inner, budget, substream(seed, 1))?;
    let slack = SLACK_SIGMAS * (ball_mean.stderr.powi(2) + inner_sphere_mean.stderr.powi(2)).sqrt();
    let margin = ball_mean.value - inner_sphere_mean.value + slack;
    Ok(BarycenterVerdict { ball_mean, inner_sphere_mean, slack, margin, passed: margin >= 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::catalog;
    use rand::Rng;

    fn ball(c: &[f64], r: f64) -> BallSpec {
        BallSpec::new(Point::new(c.to_vec()).unwrap(), r).unwrap()
    }

    #[test]
    fn constants_by_dimension() {
        assert_eq!(decomposition_constant(1), 3.0);
        assert_eq!(decomposition_constant(2), 27.0 / 4.0);
        assert_eq!(decomposition_constant(3), 243.0 / 16.0);
    }

    #[test]
    fn decomposition_of_log_at_its_pole() {
        let f: PshExpr = "logabs(poly 1 0)".parse().unwrap();
        let rep = decomposition_check(&f, &ball(&[0.0, 0.0], 0.5), 50_000, 1).unwrap();
        assert!(rep.passed);
        assert!((rep.sup_r.value - rep.sup_half.value - std::f64::consts::LN_2).abs() < 1e-9);
        // sphere means are exactly log r, so the second increment is 1/(2n)
        assert!((rep.sphere_r.value - rep.sphere_inner.value - 0.5).abs() < 1e-9);
        assert!((rep.i2 - 0.5).abs() < 3.0 * rep.ball_mean.stderr + 1e-3);
        assert!(rep.i1.abs() < 1e-9);
    }

    #[test]
    fn decomposition_pole_outside() {
        let f: PshExpr = "logabs(poly 1 -1)".parse().unwrap();
        let rep = decomposition_check(&f, &ball(&[0.0, 0.0], 0.25), 50_000, 2).unwrap();
        assert!(rep.passed && rep.margin > rep.slack, "{rep:?}");
        let c = PshExpr::constant(-2.0).unwrap();
        let rep = decomposition_check(&c, &ball(&[0.0, 0.0], 0.25), 1000, 2).unwrap();
        assert!(rep.passed && rep.mo.value == 0.0 && rep.rhs == 0.0);
    }

    #[test]
    fn harnack_closed_form() {
        let f: PshExpr = "add(-1, logabs(poly 1 0))".parse().unwrap();
        let b = ball(&[0.0, 0.0], 1.0);
        let x = Point::new(vec![0.5, 0.0]).unwrap();
        let v = harnack_check(&f, &b, &Probes::Points(vec![x]), 10_000, 3).unwrap();
        let row = &v.rows[0];
        assert!((row.lhs - (0.5f64.ln() - 1.0)).abs() < 1e-12);
        assert!((row.rhs + 1.0 / 3.0).abs() < 1e-9, "{row:?}");
        assert!(v.passed);
    }

    #[test]
    fn harnack_constant_at_center_is_equality() {
        let f = PshExpr::constant(-2.0).unwrap();
        let b = ball(&[0.0, 0.0, 0.0, 0.0], 0.4);
        let v = harnack_check(&f, &b, &Probes::Points(vec![Point::origin(2)]), 1000, 4).unwrap();
        assert_eq!(v.rows[0].lhs, v.rows[0].rhs);
        assert!(v.passed);
    }

    #[test]
    fn harnack_in_c2_random_probes() {
        let f = PshExpr::add_const(-1.0, PshExpr::log_norm(Point::origin(2), None).unwrap()).unwrap();
        let v = harnack_check(&f, &ball(&[0.0; 4], 1.0), &Probes::Random(100), 10_000, 5).unwrap();
        assert!(v.passed && v.rows.len() == 100);
        assert!((v.sphere_mean.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn harnack_requires_nonpositive() {
        let f: PshExpr = "logabs(poly 1 0)".parse().unwrap();
        assert!(matches!(
            harnack_check(&f, &ball(&[0.0, 0.0], 2.0), &Probes::Random(3), 1000, 6),
            Err(OscillationError::NotNonPositive { .. })
        ));
    }

    #[test]
    fn barycenter_cases() {
        let f: PshExpr = "logabs(poly 1 0)".parse().unwrap();
        let v = barycenter_check(&f, &ball(&[0.0, 0.0], 0.8), 100_000, 7).unwrap();
        // equality case: both sides are log r - 1/2
        assert!(v.passed && (v.ball_mean.value - v.inner_sphere_mean.value).abs() <= v.slack);
        let g: PshExpr = "max(logabs(poly 1 0), const(-1))".parse().unwrap();
        let v = barycenter_check(&g, &ball(&[0.0, 0.0], 1.0), 100_000, 8).unwrap();
        // ∫ max(log ρ, -1) 2ρ dρ = -1/2 + e^{-2}/2 against max(-1/2, -1)
        let exact = -0.5 + (-2.0f64).exp() / 2.0;
        assert!((v.ball_mean.value - exact).abs() <= 3.0 * v.ball_mean.stderr);
        assert!(v.passed && v.margin > v.slack);
    }

    #[test]
    fn uo_dominates_half_mo_on_catalog() {
        let entries = catalog();
        let mut rng = crate::rng::stream(40);
        for k in 0..100 {
            let e = &entries[k % entries.len()];
            let wb = e.working_ball();
            let r = wb.radius() * rng.gen_range(0.05..0.5);
            let c: Vec<f64> =
                e.point.coords().iter().map(|v| v + rng.gen_range(-0.4..0.4) * wb.radius()).collect();
            let b = ball(&c, r);
            let m = mo(&e.expr, &b, 4000, 500 + k as u64).unwrap();
            let u = super::super::uo(&e.expr, &b, 4000, 600 + k as u64).unwrap();
            let s = (m.stderr.powi(2) + 4.0 * u.stderr.powi(2)).sqrt();
            assert!(m.value <= 2.0 * u.value + 3.0 * s, "{}: mo {m:?} uo {u:?}", e.name);
        }
    }
}
