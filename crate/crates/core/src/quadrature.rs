//! Periodic time quadrature.
//!
//! The composite trapezoid rule on uniformly spaced samples is spectrally
//! accurate for smooth periodic integrands, and the sample times coincide with
//! the PDE time grid.

use crate::error::{Error, Result};
use crate::model::EvolutionRate;

/// `M + 1` uniform samples of a T-periodic function on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSamples {
    period: f64,
    values: Vec<f64>,
}

impl PeriodicSamples {
    pub fn new(period: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 9 {
            return Err(Error::config(
                "samples",
                "at least 8 intervals are required",
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("samples", "non-finite sample"));
        }
        let (first, last) = (values[0], values[values.len() - 1]);
        if (first - last).abs() > 1e-10 * (1.0 + first.abs()) {
            return Err(Error::config("samples", "first and last samples differ"));
        }
        Ok(Self { period, values })
    }

    pub fn from_fn(period: f64, intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=intervals)
            .map(|m| f(period * m as f64 / intervals as f64))
            .collect();
        Self::new(period, values)
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `∫₀ᵀ f dt` by the composite trapezoid rule.
pub fn periodic_integral(f: &PeriodicSamples) -> f64 {
    trapezoid(&f.values, f.period)
}

/// Trapezoid rule over `[0, T]` for uniformly spaced samples with endpoints.
pub(crate) fn trapezoid(values: &[f64], period: f64) -> f64 {
    let m = values.len() - 1;
    let h = period / m as f64;
    let inner: f64 = values[1..m].iter().sum();
    h * (inner + 0.5 * (values[0] + values[m]))
}

/// `(1/T)∫₀ᵀ ρ⁻²(t) dt`.
pub fn mean_inverse_rho_squared(rho: &EvolutionRate, intervals: usize) -> Result<f64> {
    let samples = PeriodicSamples::from_fn(rho.period(), intervals, |t| {
        let r = rho.value(t);
        1.0 / (r * r)
    })?;
    Ok(periodic_integral(&samples) / rho.period())
}
