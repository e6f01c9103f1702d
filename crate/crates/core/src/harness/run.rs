use serde::Serialize;
use serde_json::{json, Value};

use super::check::{worst, Check, Checker, Relation};
use super::config::{Analysis, ExpectedOutcome, ExpectedSphere, Resolved, ScenarioConfig};
use super::plot::{jn_plot, lelong_plot, profile_plot};
use super::{defaults, Artifact, HarnessError, RunRecord};
use crate::geometry::{interior_sphere_check, SphereVerdict};
use crate::integrability::{
    integrability_index, jn_profile, kappa_numeric, kappa_transform, skoda_report, sobolev_check, IotaOptions,
};
use crate::lelong::{lelong_at, lelong_uniform, slope_diagnostics, RadiusGrid};
use crate::oscillation::{
    barycenter_check, bmo_norm, decomposition_check, harnack_check, mo, uo, vmo_modulus, Probes, SLACK_SIGMAS,
};
use crate::quadrature::Outcome;
use crate::rng::substream;

const THREE_SE: &str = "3 standard errors";

fn csv_string(write: impl FnOnce(&mut Vec<u8>) -> Result<(), csv::Error>) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    r: &'a Resolved,
    k: Checker,
    checks: Vec<Check>,
    artifacts: Vec<Artifact>,
    name: String,
}

impl Ctx<'_> {
    fn grid(&self) -> Result<RadiusGrid, HarnessError> {
        let c = self.cfg;
        RadiusGrid::new(c.r0.unwrap(), c.ratio.unwrap(), c.count.unwrap()).map_err(|e| HarnessError::Config(e.to_string()))
    }

    fn seed(&self) -> u64 {
        self.cfg.seed.unwrap()
    }

    fn budget(&self) -> usize {
        self.cfg.budget.unwrap()
    }

    fn artifact(&mut self, ext: &str, contents: String) {
        self.artifacts.push(Artifact { file: format!("{}.{ext}", self.name), contents });
    }

    /// `expect` and `expect_below` against the principal value.
    fn expectations(&mut self, principal: Option<f64>) {
        let Some(v) = principal else { return };
        if let Some(want) = self.cfg.expect {
            let (slack, src) = match self.cfg.expect_tol {
                Some(t) => (t, "config expect_tol".to_string()),
                None => (defaults::RELATIVE_TOLERANCE * want.abs().max(1.0), format!("defaults v{}: relative {}", defaults::VERSION, defaults::RELATIVE_TOLERANCE)),
            };
            self.checks.push(self.k.bound("expect", Relation::Eq, v, want, slack, &src));
        }
        if let Some(top) = self.cfg.expect_below {
            self.checks.push(self.k.bound("expect_below", Relation::Le, v, top, 0.0, "config expect_below"));
        }
    }
}

/// Runs one resolved scenario.
pub(super) fn run(cfg: &ScenarioConfig, r: &Resolved) -> Result<(RunRecord, Vec<Artifact>), HarnessError> {
    let mut cx = Ctx {
        cfg,
        r,
        k: Checker { tolerance: cfg.tolerance },
        checks: Vec::new(),
        artifacts: Vec::new(),
        name: cfg.run_name(),
    };
    let (results, principal, samples) = dispatch(&mut cx)?;
    cx.expectations(principal);
    let pass = cx.checks.iter().all(|c| c.pass);
    let record = RunRecord {
        name: cx.name.clone(),
        analysis: cfg.analysis.as_str().to_string(),
        config: cfg.clone(),
        results,
        checks: cx.checks,
        nominal_samples: samples,
        pass,
    };
    Ok((record, cx.artifacts))
}

fn dispatch(cx: &mut Ctx) -> Result<(Value, Option<f64>, u64), HarnessError> {
    let cfg = cx.cfg;
    let r = cx.r;
    let seed = cx.seed();
    let rel = format!("defaults v{}: relative {}", defaults::VERSION, defaults::RELATIVE_TOLERANCE);
    match cfg.analysis {
        Analysis::Lelong => {
            let f = r.f.as_ref().unwrap();
            let grid = cx.grid()?;
            let est = lelong_at(f, r.point.as_ref().unwrap(), &grid, cx.budget(), seed)?;
            let nu = est.consensus;
            let c = cx.k.bound("three-formula agreement", Relation::Le, est.spread, 0.0, defaults::RELATIVE_TOLERANCE * nu.max(1.0), &rel);
            cx.checks.push(c);
            for (name, fit) in est.fits() {
                let d = slope_diagnostics(fit);
                cx.checks.push(cx.k.matches(format!("{name} monotone and convex in log r"), d.ok().to_string(), "true"));
            }
            cx.artifact("csv", csv_string(|w| est.write_csv(w))?);
            cx.artifact("svg", lelong_plot(&est).to_svg()?);
            let samples = 3 * grid.count() as u64 * cx.budget() as u64;
            Ok((to_value(&est), Some(nu), samples))
        }
        Analysis::LelongUniform => {
            let grid = cx.grid()?;
            let cb = cfg.center_budget.unwrap();
            let u = lelong_uniform(r.f.as_ref().unwrap(), r.domain.as_ref().unwrap(), cb, &grid, cx.budget(), seed)?;
            let c = cx.k.bound("three-formula agreement at the argmax", Relation::Le, u.spread, 0.0, defaults::RELATIVE_TOLERANCE * u.value.max(1.0), &rel);
            cx.checks.push(c);
            let samples = (u.rows.len() * 3 * grid.count() * cx.budget()) as u64;
            Ok((to_value(&u), Some(u.value), samples))
        }
        Analysis::Mo => {
            let f = r.f.as_ref().unwrap();
            let b = r.ball.as_ref().unwrap();
            let m = mo(f, b, cx.budget(), substream(seed, 0))?;
            let u = uo(f, b, cx.budget(), substream(seed, 1))?;
            let slack = SLACK_SIGMAS * (m.stderr.powi(2) + 4.0 * u.stderr.powi(2)).sqrt();
            cx.checks.push(cx.k.bound("MO <= 2 UO", Relation::Le, m.value, 2.0 * u.value, slack, THREE_SE));
            Ok((json!({ "ball": b, "mo": m, "uo": u }), Some(m.value), 4 * cx.budget() as u64))
        }
        Analysis::Bmo => {
            let radii = cfg.radii.clone().unwrap();
            let cb = cfg.center_budget.unwrap();
            let e = bmo_norm(r.f.as_ref().unwrap(), r.domain.as_ref().unwrap(), cb, &radii, cx.budget(), seed)?;
            let samples = (e.balls * 2 * cx.budget()) as u64;
            Ok((to_value(&e), Some(e.value.value), samples))
        }
        Analysis::VmoProfile => {
            let radii = cfg.radii.clone().unwrap();
            let cb = cfg.center_budget.unwrap();
            let p = vmo_modulus(r.f.as_ref().unwrap(), r.domain.as_ref().unwrap(), &radii, cb, cx.budget(), seed)?;
            // worst rise between consecutive radii
            let rises: Vec<Check> = (1..p.worst_mo.len())
                .map(|k| {
                    let s = (p.stderr[k].powi(2) + p.stderr[k - 1].powi(2)).sqrt();
                    cx.k.bound(format!("ω nonincreasing at r = {}", p.radii[k]), Relation::Le, p.worst_mo[k], p.worst_mo[k - 1], SLACK_SIGMAS * s, THREE_SE)
                })
                .collect();
            cx.checks.extend(worst(rises));
            cx.artifact("csv", csv_string(|w| p.write_csv(w))?);
            cx.artifact("svg", profile_plot(&p).to_svg()?);
            let samples = (radii.len() * cb * 2 * cx.budget()) as u64;
            Ok((to_value(&p), p.worst_mo.last().copied(), samples))
        }
        Analysis::Decomposition => {
            let d = decomposition_check(r.f.as_ref().unwrap(), r.ball.as_ref().unwrap(), cx.budget(), seed)?;
            let src = "3 standard errors plus the sup refinement gap";
            cx.checks.push(cx.k.bound("MO <= decomposition bound", Relation::Le, d.mo.value, d.rhs, d.slack, src));
            Ok((to_value(&d), Some(d.mo.value), 7 * cx.budget() as u64))
        }
        Analysis::Harnack => {
            let probes = Probes::Random(cfg.probes.unwrap());
            let h = harnack_check(r.f.as_ref().unwrap(), r.ball.as_ref().unwrap(), &probes, cx.budget(), seed)?;
            let rows: Vec<Check> = h
                .rows
                .iter()
                .map(|row| cx.k.bound(format!("harnack at ({})", row.x), Relation::Le, row.lhs, row.rhs, row.slack, THREE_SE))
                .collect();
            cx.checks.extend(worst(rows));
            Ok((to_value(&h), None, 2 * cx.budget() as u64))
        }
        Analysis::Barycenter => {
            let v = barycenter_check(r.f.as_ref().unwrap(), r.ball.as_ref().unwrap(), cx.budget(), seed)?;
            let c = cx.k.bound("ball mean >= inner sphere mean", Relation::Ge, v.ball_mean.value, v.inner_sphere_mean.value, v.slack, THREE_SE);
            cx.checks.push(c);
            Ok((to_value(&v), None, 2 * cx.budget() as u64))
        }
        Analysis::Iota => {
            let opts = iota_options(cfg);
            let res = integrability_index(r.f.as_ref().unwrap(), r.point.as_ref().unwrap(), &opts, seed)?;
            let samples = (res.probes.len() * opts.levels * opts.budget_per_level) as u64;
            cx.artifact(
                "csv",
                csv_string(|w| {
                    let mut out = csv::Writer::from_writer(w);
                    out.write_record(["r", "budget_per_level", "outcome", "rule"])?;
                    for p in &res.probes {
                        out.write_record([p.r.to_string(), p.budget_per_level.to_string(), p.outcome.into(), p.rule.into()])?;
                    }
                    out.flush()?;
                    Ok(())
                })?,
            );
            Ok((to_value(&res), Some(res.iota), samples))
        }
        Analysis::Skoda => {
            let grid = cx.grid()?;
            let opts = iota_options(cfg);
            let s = skoda_report(r.f.as_ref().unwrap(), r.point.as_ref().unwrap(), &grid, cx.budget(), &opts, seed)?;
            let src = "0.05 max(1, ν) plus the ι half-width and the Lelong spread";
            cx.checks.push(cx.k.bound("ν/n <= ι", Relation::Ge, s.iota.iota, s.lower, s.slack, src));
            cx.checks.push(cx.k.bound("ι <= ν", Relation::Le, s.iota.iota, s.upper, s.slack, src));
            if let Some(t) = cfg.expect_tight {
                let name = |t| serde_json::to_value(t).unwrap().as_str().unwrap().to_string();
                cx.checks.push(cx.k.matches("tight end", name(s.tight), name(t)));
            }
            let samples = (3 * grid.count() * cx.budget() + s.iota.probes.len() * opts.levels * opts.budget_per_level) as u64;
            Ok((to_value(&s), Some(s.iota.iota), samples))
        }
        Analysis::Jn => {
            let p = jn_profile(r.f.as_ref().unwrap(), r.ball.as_ref().unwrap(), cfg.lambda_max, cfg.steps.unwrap(), cx.budget(), seed)?;
            if let Some(rate) = p.decay_rate {
                cx.checks.push(cx.k.bound("decay rate > 0", Relation::Ge, rate, 0.0, 0.0, "exact"));
            }
            if let Some(m) = p.moment {
                cx.checks.push(cx.k.matches("exponential moment finite at half the rate", m.finite.to_string(), "true"));
            }
            cx.artifact("csv", csv_string(|w| p.write_csv(w))?);
            if p.tail_fraction.iter().any(|t| *t > 0.0) {
                cx.artifact("svg", jn_plot(&p).to_svg()?);
            }
            Ok((to_value(&p), p.decay_rate, cx.budget() as u64))
        }
        Analysis::Sobolev => {
            let levels = cfg.levels.unwrap();
            let v = sobolev_check(r.f.as_ref().unwrap(), r.ball.as_ref().unwrap(), cx.budget(), levels, seed)?;
            if let Some(want) = cfg.expect_outcome {
                let observed = match v.outcome {
                    Outcome::Finite(_) => "finite",
                    Outcome::Divergent { .. } => "divergent",
                    Outcome::Inconclusive => "inconclusive",
                };
                let expected = match want {
                    ExpectedOutcome::Finite => "finite",
                    ExpectedOutcome::Divergent => "divergent",
                };
                cx.checks.push(cx.k.matches("∫|∇f|² verdict", observed, expected));
            }
            let samples = (v.levels.len() * cx.budget()) as u64;
            Ok((to_value(&v), None, samples))
        }
        Analysis::Kappa => {
            let eta = r.eta.unwrap();
            let mut ts = cfg.t.clone().unwrap();
            ts.sort_by(f64::total_cmp);
            let mut rows = Vec::new();
            for &t in &ts {
                let closed = kappa_transform(&eta, t)?;
                let numeric = kappa_numeric(&eta, t)?;
                let tol = defaults::KAPPA_TOLERANCE * closed.abs().max(1.0);
                let src = format!("defaults v{}: {:e} relative", defaults::VERSION, defaults::KAPPA_TOLERANCE);
                cx.checks.push(cx.k.bound(format!("closed form matches quadrature at t = {t}"), Relation::Eq, numeric, closed, tol, &src));
                rows.push(json!({ "t": t, "closed": closed, "numeric": numeric }));
            }
            let vals: Vec<f64> = rows.iter().map(|v| v["closed"].as_f64().unwrap()).collect();
            let increasing = ts.windows(2).zip(vals.windows(2)).all(|(t, v)| t[1] == t[0] || v[1] > v[0]);
            cx.checks.push(cx.k.matches("κ strictly increasing", increasing.to_string(), "true"));
            cx.artifact(
                "csv",
                csv_string(|w| {
                    let mut out = csv::Writer::from_writer(w);
                    out.write_record(["t", "closed", "numeric"])?;
                    for v in &rows {
                        out.write_record([v["t"].to_string(), v["closed"].to_string(), v["numeric"].to_string()])?;
                    }
                    out.flush()?;
                    Ok(())
                })?,
            );
            Ok((json!({ "eta": eta, "rows": rows }), None, 0))
        }
        Analysis::InteriorSphere => {
            let radii = cfg.radii.clone().unwrap();
            let v = interior_sphere_check(r.domain.as_ref().unwrap(), r.point.as_ref().unwrap(), &radii)?;
            if let Some(want) = cfg.expect_sphere {
                let observed = match v {
                    SphereVerdict::Holds { .. } => "holds",
                    SphereVerdict::FailsUpTo { .. } => "fails",
                };
                let expected = match want {
                    ExpectedSphere::Holds => "holds",
                    ExpectedSphere::Fails => "fails",
                };
                cx.checks.push(cx.k.matches("interior sphere condition", observed, expected));
                if let (SphereVerdict::FailsUpTo { r_min }, ExpectedSphere::Fails) = (&v, want) {
                    let smallest = radii.last().copied().unwrap_or(*r_min);
                    cx.checks.push(cx.k.bound("fails down to the smallest radius", Relation::Le, *r_min, smallest, 0.0, "exact"));
                }
            }
            Ok((to_value(&v), None, 0))
        }
    }
}

fn iota_options(cfg: &ScenarioConfig) -> IotaOptions {
    let w = cfg.window.unwrap();
    IotaOptions {
        window: (w[0], w[1]),
        tol: cfg.tol.unwrap(),
        levels: cfg.levels.unwrap(),
        budget_per_level: if cfg.analysis == Analysis::Iota { cfg.budget.unwrap() } else { defaults::IOTA_BUDGET },
        margin: cfg.margin.unwrap(),
    }
}
