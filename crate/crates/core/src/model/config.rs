use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::coefficient::CoefficientProfile;
use super::grid::{Field, Grid1D};
use super::rate::EvolutionRate;
use crate::error::{ConfigIssue, ConfigIssues, Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 200;
pub const DEFAULT_STEPS_PER_PERIOD: usize = 2000;
/// Default cap on `N·M`.
pub const DEFAULT_WORK_BUDGET: usize = 4_000_000;

/// Initial profile on `[0, L]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialData {
    /// `mean + Σ amplitude·cos(k·π·y)` over `(k, amplitude)` pairs.
    Cosine {
        mean: f64,
        #[serde(default)]
        modes: Vec<(u32, f64)>,
    },
    /// Values at uniformly spaced points over `[0, L]`, linearly interpolated.
    Tabulated { values: Vec<f64> },
}

impl InitialData {
    pub fn cosine(mean: f64, modes: &[(u32, f64)]) -> Self {
        Self::Cosine {
            mean,
            modes: modes.to_vec(),
        }
    }

    pub fn zero() -> Self {
        Self::cosine(0.0, &[])
    }

    pub fn sample(&self, grid: &Grid1D) -> Field {
        match self {
            Self::Cosine { mean, modes } => Field::from_fn(grid, |y| {
                mean + modes
                    .iter()
                    .map(|&(k, amp)| amp * (k as f64 * PI * y).cos())
                    .sum::<f64>()
            }),
            Self::Tabulated { values } => {
                let n = values.len();
                Field::from_fn(grid, |y| {
                    if n == 1 {
                        return values[0];
                    }
                    let s = (y / grid.length() * (n - 1) as f64).clamp(0.0, (n - 1) as f64);
                    let j = (s.floor() as usize).min(n - 2);
                    let frac = s - j as f64;
                    values[j] * (1.0 - frac) + values[j + 1] * frac
                })
            }
        }
    }

    fn is_empty(&self) -> bool {
        matches!(self, Self::Tabulated { values } if values.is_empty())
    }
}

fn default_n() -> u32 {
    1
}
fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}
fn default_steps() -> usize {
    DEFAULT_STEPS_PER_PERIOD
}

/// A full problem instance of the transformed SIS system on `(0, L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub d_s: f64,
    pub d_i: f64,
    /// Spatial dimension in the dilution term `n·ρ̇/ρ`.
    #[serde(default = "default_n")]
    pub n: u32,
    pub length: f64,
    pub rho: EvolutionRate,
    pub a: CoefficientProfile,
    pub b: CoefficientProfile,
    pub beta: CoefficientProfile,
    pub gamma: CoefficientProfile,
    /// Number of grid intervals `N`.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_steps")]
    pub steps_per_period: usize,
    pub initial_s: InitialData,
    pub initial_i: InitialData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub work_budget: Option<usize>,
}

impl ModelConfig {
    pub fn period(&self) -> f64 {
        self.rho.period()
    }

    pub fn grid(&self) -> Grid1D {
        Grid1D::new(self.length, self.grid_points)
    }

    pub fn dt(&self) -> f64 {
        self.period() / self.steps_per_period as f64
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every invariant and returns the config, or all violations.
    pub fn validated(self) -> Result<Self> {
        match self.validate() {
            Ok(()) => Ok(self),
            Err(issues) => Err(Error::Config(issues)),
        }
    }

    pub fn validate(&self) -> std::result::Result<(), ConfigIssues> {
        let mut issues = Vec::new();
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.d_s) {
            issues.push(ConfigIssue::new("d_s", "d_s must be positive"));
        }
        if !positive(self.d_i) {
            issues.push(ConfigIssue::new("d_i", "d_i must be positive"));
        }
        if self.n == 0 {
            issues.push(ConfigIssue::new("n", "n must be a positive integer"));
        }
        if !positive(self.length) {
            issues.push(ConfigIssue::new("length", "length must be positive"));
        }
        if self.grid_points < 8 {
            issues.push(ConfigIssue::new(
                "grid_points",
                "grid_points must be at least 8",
            ));
        }
        if self.steps_per_period < 16 {
            issues.push(ConfigIssue::new(
                "steps_per_period",
                "steps_per_period must be at least 16",
            ));
        }
        let budget = self.work_budget.unwrap_or(DEFAULT_WORK_BUDGET);
        if self.grid_points.saturating_mul(self.steps_per_period) > budget {
            issues.push(ConfigIssue::new(
                "grid_points",
                format!("grid_points * steps_per_period exceeds the work budget {budget}"),
            ));
        }
        self.rho.check("rho", &mut issues);
        let profiles = [
            ("a", &self.a),
            ("b", &self.b),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
        ];
        for (name, p) in profiles {
            p.check_finite(name, &mut issues);
        }
        if !issues.is_empty() {
            return Err(ConfigIssues(issues));
        }

        // Positivity is checked on the space-time sample grid the solvers use.
        let grid = self.grid();
        let m = self.steps_per_period;
        let period = self.period();
        for (name, p) in profiles {
            let mut bad = None;
            'outer: for i in 0..=m {
                let t = period * i as f64 / m as f64;
                let r = self.rho.value(t);
                for y in grid.points() {
                    let v = p.evaluate_with(r, period, y, t);
                    if !(v.is_finite() && v > 0.0) {
                        bad = Some((y, t));
                        break 'outer;
                    }
                }
            }
            if let Some((y, t)) = bad {
                issues.push(ConfigIssue::new(
                    name,
                    format!("{name} must be positive (fails at y = {y}, t = {t})"),
                ));
            }
        }

        if self.initial_s.is_empty() {
            issues.push(ConfigIssue::new("initial_s", "initial data is empty"));
        } else if self
            .initial_s
            .sample(&grid)
            .iter()
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            issues.push(ConfigIssue::new(
                "initial_s",
                "S0 must be positive everywhere",
            ));
        }
        if self.initial_i.is_empty() {
            issues.push(ConfigIssue::new("initial_i", "initial data is empty"));
        } else {
            let i0 = self.initial_i.sample(&grid);
            if i0.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                issues.push(ConfigIssue::new("initial_i", "I0 must be nonnegative"));
            } else if i0.iter().all(|v| *v == 0.0) {
                issues.push(ConfigIssue::new(
                    "initial_i",
                    "I0 must not vanish identically (I0 ≢ 0)",
                ));
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ConfigIssues(issues))
        }
    }
}
