use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::rate::EvolutionRate;
use crate::error::ConfigIssue;

/// A T-periodic function of time: `mean + Σ amplitude·cos(2π·k·t/T)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeSeries {
    #[serde(default)]
    pub mean: f64,
    /// `(harmonic k, amplitude)` pairs.
    #[serde(default)]
    pub cosines: Vec<(u32, f64)>,
}

impl TimeSeries {
    pub fn value(&self, t: f64, period: f64) -> f64 {
        self.mean
            + self
                .cosines
                .iter()
                .map(|&(k, amp)| amp * (TAU * k as f64 * t / period).cos())
                .sum::<f64>()
    }

    fn is_finite(&self) -> bool {
        self.mean.is_finite() && self.cosines.iter().all(|(_, a)| a.is_finite())
    }
}

/// A model coefficient (a, b, β or γ).
///
/// Non-separable forms are profiles in the material coordinate `z = ρ(t)·y`.
/// The separable form is `c(y)/ρ²(t) + g(t)` with `c` evaluated at `y` itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum CoefficientProfile {
    Constant {
        value: f64,
    },
    /// `c0 + c1·z`
    Affine {
        c0: f64,
        c1: f64,
    },
    /// `c0 + c1·exp(c2·z)`
    Exponential {
        c0: f64,
        c1: f64,
        c2: f64,
    },
    Separable {
        c: Box<CoefficientProfile>,
        #[serde(default)]
        g: TimeSeries,
    },
}

impl CoefficientProfile {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn affine(c0: f64, c1: f64) -> Self {
        Self::Affine { c0, c1 }
    }

    pub fn exponential(c0: f64, c1: f64, c2: f64) -> Self {
        Self::Exponential { c0, c1, c2 }
    }

    /// `c(y)/ρ²(t)` with no additive time term.
    pub fn separable(c: CoefficientProfile) -> Self {
        Self::Separable {
            c: Box::new(c),
            g: TimeSeries::default(),
        }
    }

    /// Value of the profile at material coordinate `z`. For the separable
    /// form this is `c(z)`, the time factor left out.
    pub fn profile(&self, z: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Affine { c0, c1 } => c0 + c1 * z,
            Self::Exponential { c0, c1, c2 } => c0 + c1 * (c2 * z).exp(),
            Self::Separable { c, .. } => c.profile(z),
        }
    }

    pub fn evaluate(&self, rho: &EvolutionRate, y: f64, t: f64) -> f64 {
        self.evaluate_with(rho.value(t), rho.period(), y, t)
    }

    /// Evaluation with `ρ(t)` already known; used when filling tables.
    pub fn evaluate_with(&self, rho_t: f64, period: f64, y: f64, t: f64) -> f64 {
        match self {
            Self::Separable { c, g } => c.profile(y) / (rho_t * rho_t) + g.value(t, period),
            other => other.profile(rho_t * y),
        }
    }

    pub fn is_separable(&self) -> bool {
        matches!(self, Self::Separable { .. })
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Self::Constant { .. } => true,
            Self::Affine { c1, .. } => *c1 == 0.0,
            Self::Exponential { c1, c2, .. } => *c1 == 0.0 || *c2 == 0.0,
            Self::Separable { .. } => false,
        }
    }

    /// Limit of the z-profile as `z → ∞`, if it exists.
    pub fn far_field(&self) -> Option<f64> {
        match self {
            Self::Constant { value } => Some(*value),
            Self::Affine { c0, c1 } => (*c1 == 0.0).then_some(*c0),
            Self::Exponential { c0, c1, c2 } => {
                if *c1 == 0.0 || *c2 < 0.0 {
                    Some(*c0)
                } else if *c2 == 0.0 {
                    Some(c0 + c1)
                } else {
                    None
                }
            }
            Self::Separable { .. } => None,
        }
    }

    /// Large-`y` limit of the full coefficient at time `t`.
    pub fn far_field_at(&self, rho_t: f64, period: f64, t: f64) -> Option<f64> {
        match self {
            Self::Separable { c, g } => c
                .far_field()
                .map(|v| v / (rho_t * rho_t) + g.value(t, period)),
            other => other.far_field(),
        }
    }

    pub(crate) fn check_finite(&self, path: &str, issues: &mut Vec<ConfigIssue>) {
        let finite = match self {
            Self::Constant { value } => value.is_finite(),
            Self::Affine { c0, c1 } => c0.is_finite() && c1.is_finite(),
            Self::Exponential { c0, c1, c2 } => c0.is_finite() && c1.is_finite() && c2.is_finite(),
            Self::Separable { c, g } => {
                if c.is_separable() {
                    issues.push(ConfigIssue::new(
                        format!("{path}.c"),
                        "separable profiles cannot nest",
                    ));
                    return;
                }
                c.check_finite(&format!("{path}.c"), issues);
                if !g.is_finite() {
                    issues.push(ConfigIssue::new(
                        format!("{path}.g"),
                        "non-finite parameter",
                    ));
                }
                return;
            }
        };
        if !finite {
            issues.push(ConfigIssue::new(path, "non-finite parameter"));
        }
    }
}
