use std::fmt;

use rayon::prelude::*;

use super::with_parameter;
use crate::error::{Error, Result};
use crate::model::{CoefficientTables, ModelConfig};
use crate::r0::{compute_r0, sign_condition, GradientSign};

/// Differences of at most this size count as neither increase nor decrease.
pub const SWEEP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    DiffusionI,
    Length,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::DiffusionI => "d_I",
            Self::Length => "L",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonotoneVerdict {
    StrictlyDecreasing,
    StrictlyIncreasing,
    /// Every consecutive change within the slack.
    Constant,
    /// Indices `k` at which `R0[k+1] − R0[k]` has the wrong sign.
    Violated(Vec<usize>),
}

impl fmt::Display for MonotoneVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::StrictlyDecreasing => f.write_str("strictly-decreasing"),
            Self::StrictlyIncreasing => f.write_str("strictly-increasing"),
            Self::Constant => f.write_str("constant"),
            Self::Violated(idx) => {
                let list: Vec<String> = idx.iter().map(|k| k.to_string()).collect();
                write!(f, "violated at {}", list.join(" "))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub r0: Vec<f64>,
    pub verdict: MonotoneVerdict,
    /// The direction implied by the sign condition on β and γ, if it holds.
    pub expected: Option<MonotoneVerdict>,
}

impl SweepTable {
    /// True when no direction is expected or the verdict matches it.
    pub fn passed(&self) -> bool {
        self.expected.as_ref().is_none_or(|e| *e == self.verdict)
    }
}

/// Direction of R0 in the swept parameter under each sign condition:
/// decreasing in `d_I` always; in `L` increasing when β rises and γ falls
/// with z, decreasing in the mirrored case.
pub fn expected_direction(sign: GradientSign, parameter: SweepParameter) -> MonotoneVerdict {
    match (parameter, sign) {
        (SweepParameter::DiffusionI, _) => MonotoneVerdict::StrictlyDecreasing,
        (SweepParameter::Length, GradientSign::Increasing) => MonotoneVerdict::StrictlyIncreasing,
        (SweepParameter::Length, GradientSign::Decreasing) => MonotoneVerdict::StrictlyDecreasing,
    }
}

fn classify(r0: &[f64]) -> MonotoneVerdict {
    let diffs: Vec<f64> = r0.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.iter().all(|d| d.abs() <= SWEEP_SLACK) {
        return MonotoneVerdict::Constant;
    }
    if diffs.iter().all(|&d| d < -SWEEP_SLACK) {
        return MonotoneVerdict::StrictlyDecreasing;
    }
    if diffs.iter().all(|&d| d > SWEEP_SLACK) {
        return MonotoneVerdict::StrictlyIncreasing;
    }
    // Mixed: report the steps that disagree with the net change.
    let net = r0[r0.len() - 1] - r0[0];
    MonotoneVerdict::Violated(
        diffs
            .iter()
            .enumerate()
            .filter(|(_, &d)| {
                if net < 0.0 {
                    d >= -SWEEP_SLACK
                } else {
                    d <= SWEEP_SLACK
                }
            })
            .map(|(k, _)| k)
            .collect(),
    )
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::config("values", "a sweep needs at least two values"));
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::config(
            "values",
            "sweep values must be positive and finite",
        ));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(
            "values",
            "sweep values must be strictly increasing",
        ));
    }
    Ok(())
}

/// R0 at each value of one parameter, computed in parallel.
pub fn sweep(
    config: &ModelConfig,
    parameter: SweepParameter,
    values: &[f64],
) -> Result<SweepTable> {
    check_values(values)?;
    let r0 = values
        .par_iter()
        .map(|&v| {
            let c = with_parameter(config, parameter, v).validated()?;
            compute_r0(&c).map(|r| r.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let sign = sign_condition(&CoefficientTables::new(config));
    let mut expected = sign.map(|s| expected_direction(s, parameter));
    if config.beta.is_constant() && config.gamma.is_constant() {
        expected = Some(MonotoneVerdict::Constant);
    }
    Ok(SweepTable {
        parameter,
        values: values.to_vec(),
        verdict: classify(&r0),
        r0,
        expected,
    })
}

#[allow(non_snake_case)]
pub fn sweep_dI(config: &ModelConfig, d_values: &[f64]) -> Result<SweepTable> {
    sweep(config, SweepParameter::DiffusionI, d_values)
}

#[allow(non_snake_case)]
pub fn sweep_L(config: &ModelConfig, l_values: &[f64]) -> Result<SweepTable> {
    sweep(config, SweepParameter::Length, l_values)
}
