use serde::{Deserialize, Serialize};

use super::{defaults, HarnessError};
use crate::function_model::{catalog_entry, Point, PshExpr};
use crate::geometry::{BallSpec, Domain};
use crate::integrability::{EtaKind, EtaSpec, TightEnd};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Lelong,
    LelongUniform,
    Mo,
    Bmo,
    VmoProfile,
    Decomposition,
    Harnack,
    Barycenter,
    Iota,
    Skoda,
    Jn,
    Sobolev,
    Kappa,
    InteriorSphere,
}

impl Analysis {
    pub fn as_str(self) -> &'static str {
        match self {
            Analysis::Lelong => "lelong",
            Analysis::LelongUniform => "lelong-uniform",
            Analysis::Mo => "mo",
            Analysis::Bmo => "bmo",
            Analysis::VmoProfile => "vmo-profile",
            Analysis::Decomposition => "decomposition",
            Analysis::Harnack => "harnack",
            Analysis::Barycenter => "barycenter",
            Analysis::Iota => "iota",
            Analysis::Skoda => "skoda",
            Analysis::Jn => "jn",
            Analysis::Sobolev => "sobolev",
            Analysis::Kappa => "kappa",
            Analysis::InteriorSphere => "interior-sphere",
        }
    }

    fn needs_function(self) -> bool {
        !matches!(self, Analysis::Kappa | Analysis::InteriorSphere)
    }

    fn needs_domain(self) -> bool {
        matches!(self, Analysis::LelongUniform | Analysis::Bmo | Analysis::VmoProfile | Analysis::InteriorSphere)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaName {
    Linear,
    Power,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedOutcome {
    Finite,
    Divergent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedSphere {
    Holds,
    Fails,
}

/// One scenario as a flat table. Unset keys take their value from the
/// catalog entry named by `catalog`, then from [`defaults`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub analysis: Analysis,
    /// Names the run and its files; defaults to the analysis.
    pub name: Option<String>,
    /// Expression in the text syntax.
    pub function: Option<String>,
    pub catalog: Option<String>,
    /// Domain literal such as `cusp(2)` or `ball(0 0 1)`.
    pub domain: Option<String>,
    pub point: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub r0: Option<f64>,
    pub ratio: Option<f64>,
    pub count: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub budget: Option<usize>,
    pub center_budget: Option<usize>,
    pub levels: Option<usize>,
    pub seed: Option<u64>,
    pub window: Option<[f64; 2]>,
    pub tol: Option<f64>,
    pub margin: Option<f64>,
    pub lambda_max: Option<f64>,
    pub steps: Option<usize>,
    pub probes: Option<usize>,
    pub eta: Option<EtaName>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub t: Option<Vec<f64>>,
    /// Principal value must equal this within `expect_tol`.
    pub expect: Option<f64>,
    pub expect_tol: Option<f64>,
    /// Principal value must not exceed this.
    pub expect_below: Option<f64>,
    pub expect_outcome: Option<ExpectedOutcome>,
    pub expect_tight: Option<TightEnd>,
    pub expect_sphere: Option<ExpectedSphere>,
    /// Replaces the slack of every numeric check.
    pub tolerance: Option<f64>,
    pub output: Option<String>,
}

impl ScenarioConfig {
    pub fn new(analysis: Analysis) -> Self {
        ScenarioConfig {
            analysis,
            name: None,
            function: None,
            catalog: None,
            domain: None,
            point: None,
            radius: None,
            r0: None,
            ratio: None,
            count: None,
            radii: None,
            budget: None,
            center_budget: None,
            levels: None,
            seed: None,
            window: None,
            tol: None,
            margin: None,
            lambda_max: None,
            steps: None,
            probes: None,
            eta: None,
            alpha: None,
            gamma: None,
            t: None,
            expect: None,
            expect_tol: None,
            expect_below: None,
            expect_outcome: None,
            expect_tight: None,
            expect_sphere: None,
            tolerance: None,
            output: None,
        }
    }

    pub fn from_toml(src: &str) -> Result<Self, HarnessError> {
        toml::from_str(src).map_err(|e| HarnessError::Config(e.message().to_string()))
    }

    pub fn run_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.analysis.as_str().to_string())
    }

    /// Parses and cross-checks every field, filling defaults. The returned
    /// config echo reruns to the same numbers.
    pub fn resolve(&self) -> Result<Resolved, HarnessError> {
        let cfg_err = |m: String| HarnessError::Config(m);
        let mut echo = self.clone();
        let entry = match &self.catalog {
            Some(name) => Some(catalog_entry(name).ok_or_else(|| cfg_err(format!("unknown catalog entry '{name}'")))?),
            None => None,
        };
        let text = match (&self.function, &entry) {
            (Some(_), Some(_)) => return Err(cfg_err("give either function or catalog, not both".into())),
            (Some(t), None) => Some(t.clone()),
            (None, Some(e)) => Some(e.text.to_string()),
            (None, None) => None,
        };
        let f = match &text {
            Some(t) => Some(t.parse::<PshExpr>().map_err(|e| cfg_err(format!("function: {e}")))?),
            None if self.analysis.needs_function() => return Err(cfg_err(format!("{} needs a function", self.analysis.as_str()))),
            None => None,
        };
        echo.function = text;
        echo.catalog = None;

        let domain = match &self.domain {
            Some(d) => Some(d.parse::<Domain>().map_err(|e| cfg_err(format!("domain: {e}")))?),
            None => None,
        };
        let point = match (&self.point, &entry, &domain) {
            (Some(p), _, _) => Some(Point::new(p.clone()).map_err(|e| cfg_err(format!("point: {e}")))?),
            (None, Some(e), _) => Some(e.point.clone()),
            (None, None, Some(d)) => Some(d.anchor()),
            (None, None, None) => f.as_ref().and_then(|f| f.dim()).map(Point::origin),
        };
        let radius = self.radius.or(entry.as_ref().map(|e| e.working_radius)).unwrap_or(defaults::RADIUS);
        let domain = match (domain, self.analysis.needs_domain()) {
            (Some(d), _) => Some(d),
            (None, true) => {
                let p = point.clone().ok_or_else(|| cfg_err("needs a domain or a point".into()))?;
                Some(Domain::ball(p, radius).map_err(|e| cfg_err(format!("domain: {e}")))?)
            }
            (None, false) => None,
        };
        if self.analysis.needs_function() && point.is_none() {
            return Err(cfg_err("needs a point".into()));
        }
        // dimensions must agree before any work starts
        let dims = [f.as_ref().and_then(|f| f.dim()), point.as_ref().map(Point::dim), domain.as_ref().map(Domain::dim)];
        let known: Vec<usize> = dims.iter().flatten().copied().collect();
        if known.windows(2).any(|w| w[0] != w[1]) {
            return Err(HarnessError::Dimension(format!("function, point and domain dimensions {dims:?} disagree")));
        }
        echo.domain = domain.as_ref().map(|d| d.to_string());
        echo.point = point.as_ref().map(|p| p.coords().to_vec());
        echo.radius = Some(radius);
        echo.seed = Some(self.seed.unwrap_or(defaults::SEED));

        let a = self.analysis;
        let budget_default = match a {
            Analysis::Lelong | Analysis::LelongUniform => defaults::LELONG_BUDGET,
            Analysis::Bmo | Analysis::VmoProfile => defaults::PROFILE_BUDGET,
            Analysis::Iota => defaults::IOTA_BUDGET,
            Analysis::Skoda => defaults::SKODA_LELONG_BUDGET,
            Analysis::Jn => defaults::JN_BUDGET,
            Analysis::Sobolev => defaults::SOBOLEV_BUDGET,
            _ => defaults::MEAN_BUDGET,
        };
        if !matches!(a, Analysis::Kappa | Analysis::InteriorSphere) {
            echo.budget = Some(self.budget.unwrap_or(budget_default));
        }
        if matches!(a, Analysis::Lelong | Analysis::LelongUniform | Analysis::Skoda) {
            echo.r0 = Some(self.r0.unwrap_or(defaults::GRID_R0));
            echo.ratio = Some(self.ratio.unwrap_or(defaults::GRID_RATIO));
            echo.count = Some(self.count.unwrap_or(defaults::GRID_COUNT));
        }
        if matches!(a, Analysis::LelongUniform | Analysis::Bmo | Analysis::VmoProfile) {
            echo.center_budget = Some(self.center_budget.unwrap_or(defaults::CENTER_BUDGET));
        }
        if matches!(a, Analysis::Bmo | Analysis::VmoProfile) {
            echo.radii = Some(self.radii.clone().unwrap_or(defaults::PROFILE_RADII.to_vec()));
        }
        if a == Analysis::InteriorSphere {
            echo.radii = Some(self.radii.clone().unwrap_or(defaults::SPHERE_RADII.to_vec()));
        }
        if matches!(a, Analysis::Iota | Analysis::Skoda) {
            echo.window = Some(self.window.unwrap_or(defaults::IOTA_WINDOW));
            echo.tol = Some(self.tol.unwrap_or(defaults::IOTA_TOL));
            echo.levels = Some(self.levels.unwrap_or(defaults::IOTA_LEVELS));
            echo.margin = Some(self.margin.unwrap_or(radius));
        }
        if a == Analysis::Sobolev {
            echo.levels = Some(self.levels.unwrap_or(defaults::SOBOLEV_LEVELS));
        }
        if a == Analysis::Jn {
            echo.steps = Some(self.steps.unwrap_or(defaults::JN_STEPS));
        }
        if a == Analysis::Harnack {
            echo.probes = Some(self.probes.unwrap_or(defaults::HARNACK_PROBES));
        }
        let eta = if a == Analysis::Kappa {
            let kind = match self.eta.unwrap_or(EtaName::Linear) {
                EtaName::Linear => EtaKind::Linear,
                EtaName::Power => EtaKind::Power { alpha: self.alpha.ok_or_else(|| cfg_err("power weight needs alpha".into()))? },
            };
            let gamma = self.gamma.unwrap_or(1.0);
            let spec = EtaSpec::new(kind, gamma).map_err(|e| cfg_err(e.to_string()))?;
            echo.eta = Some(self.eta.unwrap_or(EtaName::Linear));
            echo.gamma = Some(gamma);
            let t = self.t.clone().ok_or_else(|| cfg_err("kappa needs t values".into()))?;
            if t.is_empty() {
                return Err(cfg_err("kappa needs t values".into()));
            }
            Some(spec)
        } else {
            None
        };
        if let Some(tol) = self.tolerance {
            if tol.is_nan() || tol < 0.0 {
                return Err(cfg_err(format!("tolerance must be nonnegative, got {tol}")));
            }
        }
        let ball = match &point {
            Some(p) => Some(BallSpec::new(p.clone(), radius).map_err(|e| cfg_err(format!("radius: {e}")))?),
            None => None,
        };
        Ok(Resolved { echo, f, point, ball, domain, eta })
    }
}

/// A config with every field parsed.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub echo: ScenarioConfig,
    pub f: Option<PshExpr>,
    pub point: Option<Point>,
    pub ball: Option<BallSpec>,
    pub domain: Option<Domain>,
    pub eta: Option<EtaSpec>,
}
