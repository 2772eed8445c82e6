use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::ConfigIssue;

/// Shape of the domain evolution ρ(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RateKind {
    /// ρ ≡ 1, a fixed domain.
    ConstantOne,
    /// ρ(t) = exp(amplitude · (1 − cos(frequency · t))).
    ExpCosine { amplitude: f64, frequency: f64 },
    /// Uniform samples of ρ on `[0, T)`, the endpoint excluded.
    Tabulated { samples: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeMode {
    /// Closed-form derivative, or trigonometric interpolation for samples.
    #[default]
    Analytic,
    /// Periodic central differences of the samples (tabulated rates only).
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RateSpec {
    #[serde(flatten)]
    kind: RateKind,
    period: f64,
    #[serde(default)]
    derivative: DerivativeMode,
}

/// Real trigonometric interpolant of uniformly spaced periodic samples.
#[derive(Debug, Clone, PartialEq)]
struct Fourier {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    nyquist: f64,
}

impl Fourier {
    fn from_samples(samples: &[f64]) -> Self {
        let k_total = samples.len();
        let kn = k_total as f64;
        let half = (k_total - 1) / 2;
        let mean = samples.iter().sum::<f64>() / kn;
        let mut cos = Vec::with_capacity(half);
        let mut sin = Vec::with_capacity(half);
        for k in 1..=half {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, &f) in samples.iter().enumerate() {
                let phase = TAU * ((j * k) % k_total) as f64 / kn;
                a += f * phase.cos();
                b += f * phase.sin();
            }
            cos.push(2.0 * a / kn);
            sin.push(2.0 * b / kn);
        }
        let nyquist = if k_total.is_multiple_of(2) {
            samples
                .iter()
                .enumerate()
                .map(|(j, &f)| if j % 2 == 0 { f } else { -f })
                .sum::<f64>()
                / kn
        } else {
            0.0
        };
        Self {
            mean,
            cos,
            sin,
            nyquist,
        }
    }

    fn value(&self, base: f64, t: f64, n_samples: usize) -> f64 {
        let mut v = self.mean;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let w = base * (k + 1) as f64;
            v += a * (w * t).cos() + b * (w * t).sin();
        }
        if n_samples.is_multiple_of(2) {
            v += self.nyquist * (base * (n_samples / 2) as f64 * t).cos();
        }
        v
    }

    // The Nyquist mode is dropped from the derivative.
    fn derivative(&self, base: f64, t: f64) -> f64 {
        let mut v = 0.0;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let w = base * (k + 1) as f64;
            v += w * (-a * (w * t).sin() + b * (w * t).cos());
        }
        v
    }
}

/// The periodic evolving rate ρ(t) of an isotropically evolving domain.
///
/// The physical domain at time `t` is `(0, ρ(t)·L)`; material point `y` of
/// the reference interval sits at `x = ρ(t)·y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RateSpec", into = "RateSpec")]
pub struct EvolutionRate {
    spec: RateSpec,
    fourier: Option<Arc<Fourier>>,
}

impl From<RateSpec> for EvolutionRate {
    fn from(spec: RateSpec) -> Self {
        let fourier = match &spec.kind {
            RateKind::Tabulated { samples } if !samples.is_empty() => {
                Some(Arc::new(Fourier::from_samples(samples)))
            }
            _ => None,
        };
        Self { spec, fourier }
    }
}

impl From<EvolutionRate> for RateSpec {
    fn from(rate: EvolutionRate) -> Self {
        rate.spec
    }
}

impl EvolutionRate {
    pub fn constant_one(period: f64) -> Self {
        RateSpec {
            kind: RateKind::ConstantOne,
            period,
            derivative: DerivativeMode::Analytic,
        }
        .into()
    }

    /// `ρ(t) = exp(amplitude·(1 − cos(frequency·t)))` with period `2π/frequency`.
    pub fn exp_cosine(amplitude: f64, frequency: f64) -> Self {
        RateSpec {
            kind: RateKind::ExpCosine {
                amplitude,
                frequency,
            },
            period: TAU / frequency,
            derivative: DerivativeMode::Analytic,
        }
        .into()
    }

    pub fn tabulated(samples: Vec<f64>, period: f64, derivative: DerivativeMode) -> Self {
        RateSpec {
            kind: RateKind::Tabulated { samples },
            period,
            derivative,
        }
        .into()
    }

    pub fn kind(&self) -> &RateKind {
        &self.spec.kind
    }

    pub fn period(&self) -> f64 {
        self.spec.period
    }

    pub fn derivative_mode(&self) -> DerivativeMode {
        self.spec.derivative
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.spec.kind, RateKind::ConstantOne)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.value_and_derivative(t).0
    }

    /// Returns `(ρ(t), ρ̇(t))`.
    pub fn value_and_derivative(&self, t: f64) -> (f64, f64) {
        let period = self.spec.period;
        match &self.spec.kind {
            RateKind::ConstantOne => (1.0, 0.0),
            RateKind::ExpCosine {
                amplitude,
                frequency,
            } => {
                let r = (amplitude * (1.0 - (frequency * t).cos())).exp();
                (r, amplitude * frequency * (frequency * t).sin() * r)
            }
            RateKind::Tabulated { samples } => {
                let n = samples.len();
                if n == 0 {
                    return (f64::NAN, f64::NAN);
                }
                match self.spec.derivative {
                    DerivativeMode::Analytic => {
                        let fourier = self
                            .fourier
                            .as_ref()
                            .expect("tabulated rate has coefficients");
                        let base = TAU / period;
                        (fourier.value(base, t, n), fourier.derivative(base, t))
                    }
                    DerivativeMode::FiniteDifference => finite_difference(samples, period, t),
                }
            }
        }
    }

    /// `ρ̇(t)/ρ(t)`, the per-dimension dilution rate.
    pub fn log_derivative(&self, t: f64) -> f64 {
        let (r, dr) = self.value_and_derivative(t);
        dr / r
    }

    pub(crate) fn check(&self, path: &str, issues: &mut Vec<ConfigIssue>) {
        let period = self.spec.period;
        if !(period.is_finite() && period > 0.0) {
            issues.push(ConfigIssue::new(
                format!("{path}.period"),
                "period must be positive and finite",
            ));
            return;
        }
        match &self.spec.kind {
            RateKind::ConstantOne => {}
            RateKind::ExpCosine {
                amplitude,
                frequency,
            } => {
                if !amplitude.is_finite() || !frequency.is_finite() || *frequency <= 0.0 {
                    issues.push(ConfigIssue::new(
                        path,
                        "exp-cosine amplitude must be finite and frequency positive",
                    ));
                    return;
                }
                let cycles = frequency * period / TAU;
                if (cycles - cycles.round()).abs() * TAU > 1e-10 || cycles.round() < 1.0 {
                    issues.push(ConfigIssue::new(
                        format!("{path}.frequency"),
                        "frequency times period must be a positive multiple of 2π",
                    ));
                }
            }
            RateKind::Tabulated { samples } => {
                if samples.len() < 8 {
                    issues.push(ConfigIssue::new(
                        format!("{path}.samples"),
                        "tabulated rate needs at least 8 samples",
                    ));
                    return;
                }
                if samples.iter().any(|s| !s.is_finite() || *s <= 0.0) {
                    issues.push(ConfigIssue::new(
                        format!("{path}.samples"),
                        "samples must be finite and positive",
                    ));
                }
                if (samples[0] - 1.0).abs() > 1e-12 {
                    issues.push(ConfigIssue::new(
                        format!("{path}.samples"),
                        "rho(0) must equal 1",
                    ));
                }
            }
        }
    }
}

fn finite_difference(samples: &[f64], period: f64, t: f64) -> (f64, f64) {
    let n = samples.len();
    let dt = period / n as f64;
    let s = (t / dt).rem_euclid(n as f64);
    let j = (s.floor() as usize).min(n - 1);
    let frac = s - j as f64;
    let at = |i: usize| samples[i % n];
    let slope = |i: usize| (at(i + 1) - at(i + n - 1)) / (2.0 * dt);
    let value = at(j) * (1.0 - frac) + at(j + 1) * frac;
    let derivative = slope(j) * (1.0 - frac) + slope(j + 1) * frac;
    (value, derivative)
}
