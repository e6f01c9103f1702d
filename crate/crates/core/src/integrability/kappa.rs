use serde::{Deserialize, Serialize};

use super::IntegrabilityError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EtaKind {
    /// `η(t) = t`.
    Linear,
    /// `η(t) = t^{1-2α}`, `0 < α < 1/2`.
    Power { alpha: f64 },
}

/// A weight `η` on `[γ, ∞)` with `η'` positive and nonincreasing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaSpec {
    kind: EtaKind,
    gamma: f64,
}

impl EtaSpec {
    /// `γ = 0` is accepted for `Power`, where the integral still converges at
    /// the lower end.
    pub fn new(kind: EtaKind, gamma: f64) -> Result<Self, IntegrabilityError> {
        let ok = match kind {
            EtaKind::Linear => gamma.is_finite() && gamma > 0.0,
            EtaKind::Power { alpha } => alpha > 0.0 && alpha < 0.5 && gamma.is_finite() && gamma >= 0.0,
        };
        if !ok {
            return Err(IntegrabilityError::InvalidEta(format!("{kind:?} with gamma {gamma}")));
        }
        Ok(EtaSpec { kind, gamma })
    }

    pub fn kind(&self) -> EtaKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self, t: f64) -> f64 {
        match self.kind {
            EtaKind::Linear => t,
            EtaKind::Power { alpha } => t.powf(1.0 - 2.0 * alpha),
        }
    }

    pub fn eta_prime(&self, t: f64) -> f64 {
        match self.kind {
            EtaKind::Linear => 1.0,
            EtaKind::Power { alpha } => (1.0 - 2.0 * alpha) * t.powf(-2.0 * alpha),
        }
    }

    fn check(&self, t: f64) -> Result<(), IntegrabilityError> {
        if !(t >= self.gamma && t.is_finite()) {
            return Err(IntegrabilityError::EtaDomain { t, gamma: self.gamma });
        }
        Ok(())
    }
}

/// `κ_η(t) = ∫_γ^t √η'(s) / η(s) ds` in closed form.
pub fn kappa_transform(eta: &EtaSpec, t: f64) -> Result<f64, IntegrabilityError> {
    eta.check(t)?;
    let g = eta.gamma;
    Ok(match eta.kind {
        EtaKind::Linear => t.ln() - g.ln(),
        EtaKind::Power { alpha } => (1.0 - 2.0 * alpha).sqrt() / alpha * (t.powf(alpha) - g.powf(alpha)),
    })
}

/// `κ_η(t)` by double exponential quadrature of the defining integral.
pub fn kappa_numeric(eta: &EtaSpec, t: f64) -> Result<f64, IntegrabilityError> {
    eta.check(t)?;
    let g = eta.gamma;
    if t == g {
        return Ok(0.0);
    }
    // s = γ + (t - γ) e^{1 - 1/v} flattens an algebraic singularity at γ
    let integrand = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let w = (1.0 - 1.0 / v).exp();
        let s = g + (t - g) * w;
        let ds = (t - g) * w / (v * v);
        if ds == 0.0 {
            0.0
        } else {
            eta.eta_prime(s).sqrt() / eta.eta(s) * ds
        }
    };
    Ok(::quadrature::double_exponential::integrate(integrand, 0.0, 1.0, 1e-14).integral)
}
