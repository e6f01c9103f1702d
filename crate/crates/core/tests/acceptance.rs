//! Acceptance suite: one line per criterion. Runs without the libtest
//! harness so the lines are always printed.

use std::time::{Duration, Instant};

use pshlab::function_model::{catalog, CatalogEntry, Point, PshExpr};
use pshlab::geometry::BallSpec;
use pshlab::harness::{report_json, reproduce, run_scenario, Analysis, Outcome, Report, ScenarioConfig};
use pshlab::oscillation::{barycenter_check, harnack_check, mo, uo, Probes};
use pshlab::quadrature::{mean_on_ball, mean_on_sphere, sup_on_ball};
use pshlab::rng::{stream, substream};
use rand::Rng;
use serde_json::Value;

const LOG_Z: &str = "logabs(poly 1 0)";
const PAIRS: usize = 100;
const PAIR_BUDGET: usize = 20_000;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn cfg(analysis: Analysis) -> ScenarioConfig {
    ScenarioConfig { seed: Some(1), ..ScenarioConfig::new(analysis) }
}

fn run(c: &ScenarioConfig) -> Outcome {
    run_scenario(c).unwrap_or_else(|e| panic!("{:?}: {e}", c.name))
}

fn results(r: &Report, i: usize) -> &Value {
    &r.runs[i].results
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn shifted_log_lelong() -> ScenarioConfig {
    ScenarioConfig {
        function: Some("logabs(poly 1 -1)".into()),
        point: Some(vec![1.0, 0.0]),
        ..cfg(Analysis::Lelong)
    }
}

fn c1_lelong() -> Verdict {
    let (out, dt) = timed(|| run(&shifted_log_lelong()));
    let res = results(&out.report, 0);
    let (nu, spread) = (num(&res["consensus"]), num(&res["spread"]));
    let pass = (nu - 1.0).abs() <= 0.05 && spread <= 0.05 && dt < Duration::from_secs(30);
    verdict(pass, format!("ν = {nu:.4}, spread = {spread:.2e}, {:.1} s", dt.as_secs_f64()))
}

fn c2_agreement() -> Verdict {
    let start = Instant::now();
    let mut worst = (f64::NEG_INFINITY, String::new());
    let mut failed = Vec::new();
    for e in catalog() {
        let c = ScenarioConfig { catalog: Some(e.name.into()), ..cfg(Analysis::Lelong) };
        let out = run(&c);
        let res = results(&out.report, 0);
        let (nu, spread) = (num(&res["consensus"]), num(&res["spread"]));
        let ratio = spread / (0.05 * nu.max(1.0));
        if ratio.is_nan() || ratio > 1.0 {
            failed.push(e.name);
        }
        if ratio > worst.0 {
            worst = (ratio, e.name.to_string());
        }
    }
    let dt = start.elapsed();
    let pass = failed.is_empty() && dt < Duration::from_secs(300);
    verdict(pass, format!("worst spread/allowed = {:.3} ({}), failures {failed:?}, {:.1} s", worst.0, worst.1, dt.as_secs_f64()))
}

fn c3_zero_lelong() -> Verdict {
    let out = reproduce("example-5-2").unwrap();
    let nus: Vec<f64> = out.report.runs.iter().map(|r| num(&r.results["consensus"])).collect();
    let pass = out.report.pass && nus.len() == 3 && nus.iter().all(|v| *v <= 0.02);
    verdict(pass, format!("consensus {nus:.4?}"))
}

fn c4_skoda() -> Verdict {
    let out = reproduce("skoda-extremes").unwrap();
    let r = &out.report;
    let get = |i: usize, k: &str| num(&r.runs[i].results[k]);
    let iota = |i: usize| num(&r.runs[i].results["iota"]["iota"]);
    let tight = |i: usize| r.runs[i].results["tight"].as_str().unwrap_or("").to_string();
    let slow = out.timing.runs.iter().any(|(_, s)| *s >= 180.0);
    let pass = r.pass
        && (iota(0) - 0.5).abs() <= 0.05
        && (get(0, "nu") - 1.0).abs() <= 0.05
        && tight(0) == "lower"
        && (iota(1) - 1.0).abs() <= 0.05
        && tight(1) == "upper"
        && !slow;
    let times: Vec<String> = out.timing.runs.iter().map(|(n, s)| format!("{n} {s:.1} s")).collect();
    verdict(
        pass,
        format!(
            "log‖z‖: ι = {:.3}, ν = {:.3}, {}; log|z1|: ι = {:.3}, ν = {:.3}, {}; {}",
            iota(0),
            get(0, "nu"),
            tight(0),
            iota(1),
            get(1, "nu"),
            tight(1),
            times.join(", ")
        ),
    )
}

fn c5_cusp() -> Verdict {
    let (out, dt) = timed(|| reproduce("example-5-1").unwrap());
    let r = &out.report;
    let profile = results(r, 0);
    let worst: Vec<f64> = profile["worst_mo"].as_array().unwrap().iter().map(num).collect();
    let nu = num(&results(r, 1)["value"]);
    let sphere = results(r, 2);
    let fails_deep = sphere["FailsUpTo"]["r_min"].as_f64().is_some_and(|r_min| r_min <= 1e-6);
    let last = *worst.last().unwrap();
    let pass = r.pass && last < 0.1 && (nu - 1.0).abs() <= 0.05 && fails_deep && dt < Duration::from_secs(300);
    verdict(pass, format!("ω(1e-4) = {last:.4}, uniform ν = {nu:.4}, {sphere}, {:.1} s", dt.as_secs_f64()))
}

fn non_vmo_profile() -> ScenarioConfig {
    ScenarioConfig { function: Some(LOG_Z.into()), domain: Some("ball(0 0 1)".into()), ..cfg(Analysis::VmoProfile) }
}

fn c6_non_vmo() -> Verdict {
    let out = run(&non_vmo_profile());
    let res = results(&out.report, 0);
    let worst: Vec<f64> = res["worst_mo"].as_array().unwrap().iter().map(num).collect();
    let se: Vec<f64> = res["stderr"].as_array().unwrap().iter().map(num).collect();
    let target = (-1f64).exp();
    let pass = worst.iter().zip(&se).all(|(w, s)| *w >= target - 3.0 * s);
    let low = worst.iter().copied().fold(f64::INFINITY, f64::min);
    verdict(pass, format!("min over radii of worst_mo = {low:.4} vs 1/e = {target:.4}"))
}

fn c7_decomposition() -> Verdict {
    let out = reproduce("decomposition-battery").unwrap();
    let r = &out.report;
    let dims: Vec<u64> = r.runs.iter().map(|run| run.results["n"].as_u64().unwrap_or(0)).collect();
    let both = dims.contains(&1) && dims.contains(&2);
    let failures = r.failures().len();
    let pass = r.pass && r.runs.len() == 100 && both && failures == 0;
    verdict(pass, format!("{} pairs, {failures} failures, {:.1} s", r.runs.len(), out.timing.total))
}

/// Random balls well inside the working balls of the catalog entries in
/// `C^1` and `C^2`.
fn random_pairs(seed: u64, count: usize) -> Vec<(CatalogEntry, BallSpec)> {
    let entries: Vec<CatalogEntry> = catalog().into_iter().filter(|e| e.dim <= 2).collect();
    let mut rng = stream(seed);
    (0..count)
        .map(|_| {
            let e = entries[rng.gen_range(0..entries.len())].clone();
            let big = e.working_radius;
            let dir: Vec<f64> = (0..2 * e.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            let off = rng.gen_range(0.0..0.4) * big;
            let c: Vec<f64> = e.point.coords().iter().zip(&dir).map(|(c, d)| c + off * d / norm).collect();
            let b = BallSpec::new(Point::new(c).unwrap(), rng.gen_range(0.1..0.5) * big).unwrap();
            (e, b)
        })
        .collect()
}

fn c8_orderings() -> Verdict {
    let mut failures = Vec::new();
    for (i, (e, b)) in random_pairs(0x5eed_0008, PAIRS).into_iter().enumerate() {
        let seed = i as u64;
        let f = &e.expr;
        let m = mo(f, &b, PAIR_BUDGET, substream(seed, 0)).unwrap();
        let u = uo(f, &b, PAIR_BUDGET, substream(seed, 1)).unwrap();
        let sup = sup_on_ball(f, &b, PAIR_BUDGET, substream(seed, 2)).unwrap();
        let sphere = mean_on_sphere(f, &b, PAIR_BUDGET, substream(seed, 3)).unwrap();
        let ball = mean_on_ball(f, &b, PAIR_BUDGET, substream(seed, 4)).unwrap();
        let s1 = 3.0 * (m.stderr.powi(2) + 4.0 * u.stderr.powi(2)).sqrt();
        let s2 = 3.0 * (sup.stderr.powi(2) + sphere.stderr.powi(2)).sqrt();
        let s3 = 3.0 * (sphere.stderr.powi(2) + ball.stderr.powi(2)).sqrt();
        if m.value > 2.0 * u.value + s1 || sup.value + s2 < sphere.value || sphere.value + s3 < ball.value {
            failures.push(format!("{} on {b:?}", e.name));
        }
    }
    verdict(failures.is_empty(), format!("{PAIRS} pairs, failures {failures:?}"))
}

fn c9_harnack_barycenter() -> Verdict {
    // f = log|z| - 1 on the unit disc, probe 1/2: f = log 1/2 - 1, kernel 1/3,
    // sphere mean -1
    let f: PshExpr = "add(-1, logabs(poly 1 0))".parse().unwrap();
    let unit = BallSpec::new(Point::origin(1), 1.0).unwrap();
    let probe = Probes::Points(vec![Point::new(vec![0.5, 0.0]).unwrap()]);
    let h = harnack_check(&f, &unit, &probe, 10_000, 9).unwrap();
    let row = &h.rows[0];
    let closed = (row.lhs - (0.5f64.ln() - 1.0)).abs() < 1e-12 && (row.rhs + 1.0 / 3.0).abs() < 1e-9 && h.passed;

    let mut probes = 0;
    let mut failures = Vec::new();
    for (i, (e, b)) in random_pairs(0x5eed_0009, 10).into_iter().enumerate() {
        // a constant above the sup keeps the shifted function nonpositive
        let sup = sup_on_ball(&e.expr, &b, PAIR_BUDGET, substream(i as u64, 0)).unwrap();
        let g = PshExpr::add_const(-(sup.value + 0.5), e.expr.clone()).unwrap();
        let v = harnack_check(&g, &b, &Probes::Random(10), PAIR_BUDGET, i as u64).unwrap();
        probes += v.rows.len();
        failures.extend(v.rows.iter().filter(|r| !r.passed).map(|r| format!("harnack {} at {}", e.name, r.x)));
    }
    let pairs = random_pairs(0x5eed_0109, PAIRS);
    for (i, (e, b)) in pairs.iter().enumerate() {
        let v = barycenter_check(&e.expr, b, PAIR_BUDGET, i as u64).unwrap();
        if !v.passed {
            failures.push(format!("barycenter {} on {b:?}", e.name));
        }
    }
    let pass = closed && probes == 100 && failures.is_empty();
    verdict(
        pass,
        format!(
            "closed form {:.4} <= {:.4}; {probes} Harnack probes, {} barycenter balls, failures {failures:?}",
            row.lhs,
            row.rhs,
            pairs.len()
        ),
    )
}

fn jn_rate(function: &str) -> f64 {
    let c = ScenarioConfig {
        function: Some(function.into()),
        point: Some(vec![0.0, 0.0]),
        radius: Some(1.0),
        ..cfg(Analysis::Jn)
    };
    num(&results(&run(&c).report, 0)["decay_rate"])
}

fn c10_john_nirenberg() -> Verdict {
    let one = jn_rate(LOG_Z);
    let three = jn_rate("scale(3, logabs(poly 1 0))");
    let ratio = three * 3.0 / one;
    let pass = (one - 2.0).abs() <= 0.1 && (ratio - 1.0).abs() <= 0.1;
    verdict(pass, format!("rate(log|z|) = {one:.4}, rate(3 log|z|) = {three:.4}, 3·ratio = {ratio:.4}"))
}

fn c11_sobolev() -> Verdict {
    let (out, dt) = timed(|| reproduce("sobolev-sharpness").unwrap());
    let verdicts: Vec<String> = out
        .report
        .runs
        .iter()
        .map(|r| {
            let o = &r.results["outcome"];
            o.as_str().map(str::to_string).or_else(|| o.as_object().and_then(|m| m.keys().next().cloned())).unwrap_or_default()
        })
        .collect();
    let pass = out.report.pass && dt < Duration::from_secs(240);
    verdict(pass, format!("{verdicts:?}, {:.1} s", dt.as_secs_f64()))
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

type Job = Box<dyn Fn() -> Report + Sync>;

fn c12_determinism() -> Verdict {
    let jobs: Vec<(&str, Job)> = vec![
        ("lelong log|z-1|", Box::new(|| run(&shifted_log_lelong()).report)),
        ("vmo-profile log|z|", Box::new(|| run(&non_vmo_profile()).report)),
        ("example-5-2", Box::new(|| reproduce("example-5-2").unwrap().report)),
        ("sobolev-sharpness", Box::new(|| reproduce("sobolev-sharpness").unwrap().report)),
    ];
    let mut differ = Vec::new();
    for (name, job) in &jobs {
        let one = report_json(&in_pool(1, job));
        let eight = report_json(&in_pool(8, job));
        if one != eight {
            differ.push(*name);
        }
    }
    verdict(differ.is_empty(), format!("{} runs compared under 1 and 8 threads, differing {differ:?}", jobs.len()))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 12] = [
        ("1 Lelong of log|z-1| at 1", c1_lelong),
        ("2 three-formula agreement", c2_agreement),
        ("3 zero-Lelong compositions", c3_zero_lelong),
        ("4 Skoda sandwich extremes", c4_skoda),
        ("5 cusp counterexample", c5_cusp),
        ("6 non-VMO control", c6_non_vmo),
        ("7 decomposition bound", c7_decomposition),
        ("8 MO <= 2 UO and mean orderings", c8_orderings),
        ("9 Harnack and barycenter", c9_harnack_barycenter),
        ("10 John-Nirenberg rate", c10_john_nirenberg),
        ("11 Sobolev sharpness", c11_sobolev),
        ("12 determinism", c12_determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let (v, dt) = timed(check);
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {} [{:.1} s]", v.detail, dt.as_secs_f64());
        if !v.pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
    } else {
        eprintln!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
