use super::ModelError;

/// The convex increasing outer functions allowed in compositions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChiKind {
    /// `-1/x`
    NegInverse,
    /// `-log(-x)`
    NegLogNeg,
    /// `-(-x)^alpha` with `0 < alpha < 1`
    NegPowNeg { alpha: f64 },
    /// `t` composed `m` times, where `t(x) = -log(-x)`
    IteratedT { m: u32 },
    /// `slope * x + intercept` with `slope >= 0`; defined on all of R
    AffineIncreasing { slope: f64, intercept: f64 },
}

/// Outer function of a composition together with its domain bound γ: the
/// inner function must stay below `-gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexChi {
    kind: ChiKind,
    gamma: f64,
}

/// Smallest γ for which the m-fold iterate of `t` is defined on `(-inf, -gamma)`.
pub fn iterated_t_min_gamma(m: u32) -> f64 {
    (1..m).fold(0.0, |g, _| f64::exp(g))
}

impl ConvexChi {
    pub fn new(kind: ChiKind, gamma: f64) -> Result<Self, ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidChi(msg));
        if !(gamma.is_finite() && gamma > 0.0) {
            return bad(format!("gamma must be positive, got {gamma}"));
        }
        match kind {
            ChiKind::NegPowNeg { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
                return bad(format!("power must lie in (0, 1), got {alpha}"));
            }
            ChiKind::IteratedT { m: 0 } => return bad("iteration count must be positive".into()),
            ChiKind::IteratedT { m } if gamma < iterated_t_min_gamma(m) => {
                return bad(format!(
                    "iterate {m} needs gamma >= {}, got {gamma}",
                    iterated_t_min_gamma(m)
                ));
            }
            ChiKind::AffineIncreasing { slope, intercept }
                if !(slope.is_finite() && slope >= 0.0 && intercept.is_finite()) =>
            {
                return bad(format!("affine map needs finite slope >= 0, got {slope}"));
            }
            _ => {}
        }
        Ok(ConvexChi { kind, gamma })
    }

    /// The kind with its default bound: 1, or the minimal admissible bound
    /// for iterates of `t` when that is larger.
    pub fn with_default_gamma(kind: ChiKind) -> Result<Self, ModelError> {
        ConvexChi::new(kind, Self::default_gamma(kind))
    }

    pub fn default_gamma(kind: ChiKind) -> f64 {
        match kind {
            ChiKind::IteratedT { m } => iterated_t_min_gamma(m).max(1.0),
            _ => 1.0,
        }
    }

    pub fn kind(&self) -> ChiKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Affine maps are defined everywhere and ignore the bound.
    pub fn restricts_domain(&self) -> bool {
        !matches!(self.kind, ChiKind::AffineIncreasing { .. })
    }

    /// Whether χ'(x) → 0 as x → −∞, which forces zero Lelong numbers.
    pub fn prime_at_minus_infinity_zero(&self) -> bool {
        self.restricts_domain()
    }

    /// Limit of χ at −∞.
    pub fn value_at_minus_infinity(&self) -> f64 {
        match self.kind {
            ChiKind::NegInverse => 0.0,
            ChiKind::AffineIncreasing { slope, intercept } if slope == 0.0 => intercept,
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn in_domain(&self, x: f64) -> bool {
        !self.restricts_domain() || x < -self.gamma
    }

    /// χ(x); x = −∞ gives the limit value.
    pub fn apply(&self, x: f64) -> Result<f64, ModelError> {
        if !self.in_domain(x) {
            return Err(ModelError::DomainViolation { value: x, bound: -self.gamma });
        }
        if x == f64::NEG_INFINITY {
            return Ok(self.value_at_minus_infinity());
        }
        Ok(match self.kind {
            ChiKind::NegInverse => -1.0 / x,
            ChiKind::NegLogNeg => -(-x).ln(),
            ChiKind::NegPowNeg { alpha } => -(-x).powf(alpha),
            ChiKind::IteratedT { m } => (0..m).fold(x, |y, _| -(-y).ln()),
            ChiKind::AffineIncreasing { slope, intercept } => slope * x + intercept,
        })
    }

    /// χ'(x) for finite x in the domain.
    pub fn derivative(&self, x: f64) -> f64 {
        match self.kind {
            ChiKind::NegInverse => 1.0 / (x * x),
            ChiKind::NegLogNeg => -1.0 / x,
            ChiKind::NegPowNeg { alpha } => alpha * (-x).powf(alpha - 1.0),
            ChiKind::IteratedT { m } => {
                let mut y = x;
                let mut d = 1.0;
                for _ in 0..m {
                    d *= -1.0 / y;
                    y = -(-y).ln();
                }
                d
            }
            ChiKind::AffineIncreasing { slope, .. } => slope,
        }
    }
}
