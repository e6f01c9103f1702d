use rand::Rng;

use super::check::{Checker, Relation};
use super::config::{Analysis, ExpectedOutcome, ExpectedSphere, ScenarioConfig};
use super::{defaults, run_many, HarnessError, Outcome, Report};
use crate::function_model::catalog;
use crate::integrability::TightEnd;
use crate::rng::stream;

/// Pinned reproduction cases.
pub const CASES: [&str; 5] = ["example-5-1", "example-5-2", "skoda-extremes", "sobolev-sharpness", "decomposition-battery"];

const BATTERY_SIZE: usize = 100;
const BATTERY_SEED: u64 = 0xdec0;
/// `log|z - 1|`, singular at the tip of the cusp.
const SHIFTED_LOG: &str = "logabs(poly 1 -1)";

fn named(analysis: Analysis, name: &str) -> ScenarioConfig {
    ScenarioConfig { name: Some(name.into()), seed: Some(defaults::SEED), ..ScenarioConfig::new(analysis) }
}

fn configs(case: &str) -> Result<Vec<ScenarioConfig>, HarnessError> {
    Ok(match case {
        "example-5-1" => vec![
            ScenarioConfig {
                function: Some(SHIFTED_LOG.into()),
                domain: Some("cusp(2)".into()),
                expect_below: Some(0.1),
                ..named(Analysis::VmoProfile, "vmo-profile")
            },
            ScenarioConfig {
                function: Some(SHIFTED_LOG.into()),
                domain: Some("cusp(2)".into()),
                expect: Some(1.0),
                expect_tol: Some(0.05),
                ..named(Analysis::LelongUniform, "lelong-uniform")
            },
            ScenarioConfig {
                domain: Some("cusp(2)".into()),
                point: Some(vec![1.0, 0.0]),
                expect_sphere: Some(ExpectedSphere::Fails),
                ..named(Analysis::InteriorSphere, "interior-sphere")
            },
        ],
        "example-5-2" => ["neg_inverse_log", "neg_log_neg_log", "neg_sqrt_neg_log"]
            .iter()
            .map(|c| ScenarioConfig { catalog: Some((*c).into()), expect_below: Some(0.02), ..named(Analysis::Lelong, c) })
            .collect(),
        "skoda-extremes" => vec![
            ScenarioConfig {
                catalog: Some("norm_log_C2".into()),
                expect: Some(0.5),
                expect_tol: Some(0.05),
                expect_tight: Some(TightEnd::Lower),
                ..named(Analysis::Skoda, "norm_log_C2")
            },
            ScenarioConfig {
                catalog: Some("coord_log_C2".into()),
                expect: Some(1.0),
                expect_tol: Some(0.05),
                expect_tight: Some(TightEnd::Upper),
                ..named(Analysis::Skoda, "coord_log_C2")
            },
        ],
        "sobolev-sharpness" => [(0.30, true), (0.40, true), (0.45, true), (0.50, false)]
            .iter()
            .map(|&(alpha, finite)| ScenarioConfig {
                function: Some(format!("compose(negpow {alpha} gamma 2, scale(2, logabs(mpoly 2 {{1 1 0}})))")),
                point: Some(vec![0.0; 4]),
                radius: Some((-2f64).exp()),
                expect_outcome: Some(if finite { ExpectedOutcome::Finite } else { ExpectedOutcome::Divergent }),
                ..named(Analysis::Sobolev, &format!("alpha-{alpha:.2}"))
            })
            .collect(),
        "decomposition-battery" => battery(),
        other => return Err(HarnessError::UnknownCase(other.into())),
    })
}

/// Random balls inside the working balls of the catalog entries in `C^1`
/// and `C^2`.
fn battery() -> Vec<ScenarioConfig> {
    let entries: Vec<_> = catalog().into_iter().filter(|e| e.dim <= 2).collect();
    let mut rng = stream(BATTERY_SEED);
    (0..BATTERY_SIZE)
        .map(|i| {
            let e = &entries[rng.gen_range(0..entries.len())];
            let big = e.working_radius;
            let dir: Vec<f64> = (0..2 * e.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            let off = rng.gen_range(0.0..0.4) * big;
            let point = e.point.coords().iter().zip(&dir).map(|(c, d)| c + off * d / norm).collect();
            ScenarioConfig {
                catalog: Some(e.name.into()),
                point: Some(point),
                radius: Some(rng.gen_range(0.1..0.5) * big),
                seed: Some(i as u64),
                ..named(Analysis::Decomposition, &format!("pair-{i:03}-{}", e.name))
            }
        })
        .collect()
}

/// Runs a pinned case and asserts its known outcome.
pub fn reproduce(case: &str) -> Result<Outcome, HarnessError> {
    let cfgs = configs(case)?;
    let (runs, artifacts, timing) = run_many(&cfgs)?;
    let k = Checker::default();
    let mut checks = Vec::new();
    if case == "skoda-extremes" {
        for r in &runs {
            let nu = r.results["nu"].as_f64().unwrap_or(f64::NAN);
            let src = format!("defaults v{}: relative {}", defaults::VERSION, defaults::RELATIVE_TOLERANCE);
            checks.push(k.bound(format!("{}: ν = 1", r.name), Relation::Eq, nu, 1.0, defaults::RELATIVE_TOLERANCE, &src));
        }
    }
    let report = Report::new(Some(case.into()), runs, checks);
    Ok(Outcome { report, artifacts, timing })
}
