//! Domain types: the evolving rate, coefficient profiles, the problem
//! configuration and the space-time sample tables shared by the solvers.

mod coefficient;
mod config;
mod grid;
mod rate;
mod tables;

pub use coefficient::{CoefficientProfile, TimeSeries};
pub use config::{
    InitialData, ModelConfig, DEFAULT_GRID_POINTS, DEFAULT_STEPS_PER_PERIOD, DEFAULT_WORK_BUDGET,
};
pub use grid::{Field, Grid1D, PeriodicOrbit};
pub use rate::{DerivativeMode, EvolutionRate, RateKind};
pub use tables::{CoefficientTables, RateSamples, SpaceTimeTable};

use crate::error::{ConfigIssue, ConfigIssues, Error, Result};

/// Coefficient value at reference point `y` and time `t`.
pub fn evaluate_coefficient(
    profile: &CoefficientProfile,
    rho: &EvolutionRate,
    y: f64,
    t: f64,
) -> Result<f64> {
    let mut issues = Vec::new();
    profile.check_finite("profile", &mut issues);
    if !issues.is_empty() {
        return Err(Error::Config(ConfigIssues(issues)));
    }
    Ok(profile.evaluate(rho, y, t))
}

/// `(ρ(t), ρ̇(t))`.
pub fn rho_and_derivative(rho: &EvolutionRate, t: f64) -> Result<(f64, f64)> {
    if let RateKind::Tabulated { samples } = rho.kind() {
        if samples.len() < 8 {
            return Err(Error::Config(ConfigIssues(vec![ConfigIssue::new(
                "rho.samples",
                "tabulated rate needs at least 8 samples",
            )])));
        }
    }
    Ok(rho.value_and_derivative(t))
}
