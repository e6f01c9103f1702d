//! Scenario runner behind the `pshlab` command: flat TOML configs in,
//! `report.json` with a check ledger, CSV tables and SVG plots out.

mod check;
mod config;
pub mod defaults;
pub mod plot;
mod reproduce;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use check::{worst, Check, CheckKind, Checker, Relation};
pub use config::{Analysis, EtaName, ExpectedOutcome, ExpectedSphere, Resolved, ScenarioConfig};
pub use reproduce::{reproduce, CASES};

use crate::geometry::GeometryError;
use crate::integrability::{IntegrabilityError, JnProfile};
use crate::lelong::{LelongEstimate, LelongError};
use crate::oscillation::{OscillationError, OscillationProfile};
use crate::quadrature::QuadratureError;

/// Environment variable naming the output root.
pub const OUT_ENV: &str = "PSHLAB_OUT";
/// Output root when neither the command line, the config nor the
/// environment names one.
pub const DEFAULT_OUT: &str = "pshlab-out";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown case '{0}'")]
    UnknownCase(String),
    #[error("no artifact '{0}' in the report")]
    UnknownArtifact(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Plot(#[from] plot::PlotError),
    #[error(transparent)]
    Lelong(#[from] LelongError),
    #[error(transparent)]
    Oscillation(#[from] OscillationError),
    #[error(transparent)]
    Integrability(#[from] IntegrabilityError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl HarnessError {
    /// 2 for input problems, 1 for everything that happened while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Dimension(_) | HarnessError::UnknownCase(_) | HarnessError::UnknownArtifact(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub name: String,
    pub analysis: String,
    /// The resolved config; running it again reproduces `results`.
    pub config: ScenarioConfig,
    pub results: Value,
    pub checks: Vec<Check>,
    /// Function evaluations the configured budgets call for.
    pub nominal_samples: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub defaults_version: u32,
    pub case: Option<String>,
    pub runs: Vec<RunRecord>,
    /// Checks that combine several runs.
    pub checks: Vec<Check>,
    pub nominal_samples: u64,
    pub pass: bool,
}

impl Report {
    fn new(case: Option<String>, runs: Vec<RunRecord>, checks: Vec<Check>) -> Self {
        let pass = runs.iter().all(|r| r.pass) && checks.iter().all(|c| c.pass);
        Report {
            tool: "pshlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            defaults_version: defaults::VERSION,
            case,
            nominal_samples: runs.iter().map(|r| r.nominal_samples).sum(),
            runs,
            checks,
            pass,
        }
    }

    /// Every failed check, qualified by its run.
    pub fn failures(&self) -> Vec<String> {
        let runs = self.runs.iter().flat_map(|r| r.checks.iter().filter(|c| !c.pass).map(move |c| format!("{}: {}", r.name, c.name)));
        runs.chain(self.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone())).collect()
    }
}

/// A file to write next to the report.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

/// Wall-clock seconds per run. Kept out of the report so that reports are
/// byte-identical across runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timing {
    pub runs: Vec<(String, f64)>,
    pub total: f64,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
    pub timing: Timing,
}

/// Resolves and runs one config. Input errors surface before any work.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Outcome, HarnessError> {
    let resolved = cfg.resolve()?;
    let start = Instant::now();
    let (record, artifacts) = run::run(&resolved.echo, &resolved)?;
    let secs = start.elapsed().as_secs_f64();
    let timing = Timing { runs: vec![(record.name.clone(), secs)], total: secs };
    Ok(Outcome { report: Report::new(None, vec![record], Vec::new()), artifacts, timing })
}

/// Resolves every config first, then runs them in order.
pub(crate) fn run_many(cfgs: &[ScenarioConfig]) -> Result<(Vec<RunRecord>, Vec<Artifact>, Timing), HarnessError> {
    let resolved: Vec<Resolved> = cfgs.iter().map(ScenarioConfig::resolve).collect::<Result<_, _>>()?;
    let mut runs = Vec::new();
    let mut artifacts = Vec::new();
    let mut timing = Timing::default();
    let all = Instant::now();
    for r in &resolved {
        let start = Instant::now();
        let (rec, arts) = run::run(&r.echo, r)?;
        timing.runs.push((rec.name.clone(), start.elapsed().as_secs_f64()));
        runs.push(rec);
        artifacts.extend(arts);
    }
    timing.total = all.elapsed().as_secs_f64();
    Ok((runs, artifacts, timing))
}

/// Output directory: explicit, then the config's `output`, then
/// [`OUT_ENV`], then [`DEFAULT_OUT`], with the run or case name appended.
pub fn output_dir(explicit: Option<&Path>, configured: Option<&str>, name: &str) -> PathBuf {
    let root = explicit
        .map(Path::to_path_buf)
        .or_else(|| configured.map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    root.join(name)
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes `report.json`, `timing.json` and the artifacts into `dir`.
pub fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), report_json(&outcome.report))?;
    let timing = serde_json::to_string_pretty(&outcome.timing).expect("timing serializes");
    fs::write(dir.join("timing.json"), timing + "\n")?;
    for a in &outcome.artifacts {
        fs::write(dir.join(&a.file), &a.contents)?;
    }
    Ok(())
}

/// Re-renders the plot of the run named `artifact` from a report.
pub fn plot_from_report(report: &Report, artifact: &str) -> Result<String, HarnessError> {
    let name = artifact.strip_suffix(".svg").unwrap_or(artifact);
    let run = report.runs.iter().find(|r| r.name == name).ok_or_else(|| HarnessError::UnknownArtifact(artifact.into()))?;
    let bad = |e: serde_json::Error| HarnessError::Config(format!("results of '{name}': {e}"));
    let p = match run.analysis.as_str() {
        "lelong" => plot::lelong_plot(&serde_json::from_value::<LelongEstimate>(run.results.clone()).map_err(bad)?),
        "vmo-profile" => plot::profile_plot(&serde_json::from_value::<OscillationProfile>(run.results.clone()).map_err(bad)?),
        "jn" => plot::jn_plot(&serde_json::from_value::<JnProfile>(run.results.clone()).map_err(bad)?),
        _ => return Err(HarnessError::UnknownArtifact(artifact.into())),
    };
    Ok(p.to_svg()?)
}

pub fn read_report(path: &Path) -> Result<Report, HarnessError> {
    let s = fs::read_to_string(path)?;
    serde_json::from_str(&s).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}
