use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

/// One asserted inequality or expectation, with where its tolerance came
/// from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub kind: CheckKind,
    pub tolerance_source: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckKind {
    Bound {
        relation: Relation,
        lhs: f64,
        rhs: f64,
        slack: f64,
        /// Room left before failing; negative on failure.
        margin: f64,
    },
    Match {
        observed: String,
        expected: String,
    },
}

/// Builds checks, applying a config-wide tolerance override.
#[derive(Clone, Copy, Debug, Default)]
pub struct Checker {
    pub tolerance: Option<f64>,
}

impl Checker {
    pub fn bound(&self, name: impl Into<String>, relation: Relation, lhs: f64, rhs: f64, slack: f64, source: &str) -> Check {
        let (slack, source) = match self.tolerance {
            Some(t) => (t, "config tolerance".to_string()),
            None => (slack, source.to_string()),
        };
        let margin = match relation {
            Relation::Le => rhs + slack - lhs,
            Relation::Ge => lhs - rhs + slack,
            Relation::Eq => slack - (lhs - rhs).abs(),
        };
        Check {
            name: name.into(),
            kind: CheckKind::Bound { relation, lhs, rhs, slack, margin },
            tolerance_source: source,
            pass: margin >= 0.0,
        }
    }

    pub fn matches(&self, name: impl Into<String>, observed: impl Into<String>, expected: impl Into<String>) -> Check {
        let (observed, expected) = (observed.into(), expected.into());
        Check {
            name: name.into(),
            pass: observed == expected,
            kind: CheckKind::Match { observed, expected },
            tolerance_source: "exact".into(),
        }
    }
}

/// The check with the least margin; failures first.
pub fn worst(checks: Vec<Check>) -> Option<Check> {
    let margin = |c: &Check| match c.kind {
        CheckKind::Bound { margin, .. } => margin,
        CheckKind::Match { .. } => {
            if c.pass {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        }
    };
    checks.into_iter().min_by(|a, b| margin(a).total_cmp(&margin(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_replaces_slack() {
        let c = Checker::default().bound("x", Relation::Le, 1.01, 1.0, 0.05, "3 stderr");
        assert!(c.pass);
        let strict = Checker { tolerance: Some(0.0) }.bound("x", Relation::Le, 1.01, 1.0, 0.05, "3 stderr");
        assert!(!strict.pass);
        assert_eq!(strict.tolerance_source, "config tolerance");
        let eq = Checker::default().bound("y", Relation::Eq, 0.97, 1.0, 0.05, "d");
        assert!(eq.pass);
        assert!(!Checker::default().bound("z", Relation::Ge, 0.3, 0.5, 0.1, "d").pass);
    }

    #[test]
    fn worst_prefers_failures() {
        let k = Checker::default();
        let w = worst(vec![k.bound("a", Relation::Le, 0.0, 1.0, 0.0, "d"), k.matches("b", "x", "y")]).unwrap();
        assert_eq!(w.name, "b");
    }

    proptest::proptest! {
        #[test]
        fn pass_iff_margin_nonnegative(lhs in -10.0f64..10.0, rhs in -10.0f64..10.0, slack in 0.0f64..2.0, rel in 0usize..3) {
            let relation = [Relation::Le, Relation::Ge, Relation::Eq][rel];
            let c = Checker::default().bound("p", relation, lhs, rhs, slack, "d");
            let CheckKind::Bound { margin, .. } = c.kind else { unreachable!() };
            proptest::prop_assert_eq!(c.pass, margin >= 0.0);
            // a zero override never passes what the default slack fails
            let strict = Checker { tolerance: Some(0.0) }.bound("p", relation, lhs, rhs, slack, "d");
            proptest::prop_assert!(!strict.pass || c.pass);
        }
    }
}
