use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{with_parameter, SweepParameter};
use crate::error::{Error, Result};
use crate::model::{CoefficientTables, ModelConfig, SpaceTimeTable};
use crate::quadrature::trapezoid;
use crate::r0::{compute_r0, sign_condition, GradientSign};

/// Relative gap at the extreme sample above which a limit report is flagged.
pub const LIMIT_GAP_FLAG: f64 = 0.05;

/// Slack on the monotone decrease of gaps along a sequence.
const GAP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    SmallDiffusion,
    LargeDiffusion,
    SmallLength,
    LargeLength,
}

impl LimitKind {
    pub const ALL: [LimitKind; 4] = [
        LimitKind::SmallDiffusion,
        LimitKind::LargeDiffusion,
        LimitKind::SmallLength,
        LimitKind::LargeLength,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::SmallDiffusion => "d_I->0",
            Self::LargeDiffusion => "d_I->inf",
            Self::SmallLength => "L->0",
            Self::LargeLength => "L->inf",
        }
    }

    pub fn parameter(self) -> SweepParameter {
        match self {
            Self::SmallDiffusion | Self::LargeDiffusion => SweepParameter::DiffusionI,
            Self::SmallLength | Self::LargeLength => SweepParameter::Length,
        }
    }

    /// A default sequence tending to the extreme, four decades long.
    pub fn default_sequence(self) -> Vec<f64> {
        match self {
            Self::SmallDiffusion => vec![1e-1, 1e-2, 1e-3, 1e-4],
            Self::LargeDiffusion => vec![1e1, 1e2, 1e3, 1e4],
            Self::SmallLength => vec![1.0, 0.5, 0.1, 0.01],
            Self::LargeLength => vec![8.0, 16.0, 32.0, 64.0],
        }
    }
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LimitKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "d_I->0" | "small-diffusion" => Ok(Self::SmallDiffusion),
            "d_I->inf" | "large-diffusion" => Ok(Self::LargeDiffusion),
            "L->0" | "small-length" => Ok(Self::SmallLength),
            "L->inf" | "large-length" => Ok(Self::LargeLength),
            other => Err(format!(
                "unknown limit '{other}' (expected small-diffusion, large-diffusion, small-length or large-length)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LimitReport {
    pub kind: LimitKind,
    /// `(parameter, R0)` along the sequence.
    pub samples: Vec<(f64, f64)>,
    pub target: f64,
    /// `|R0 − target| / target` per sample.
    pub gaps: Vec<f64>,
    pub gaps_monotone: bool,
}

impl LimitReport {
    pub fn extreme_gap(&self) -> f64 {
        *self.gaps.last().unwrap_or(&f64::NAN)
    }

    /// Gap at the extreme sample exceeds [`LIMIT_GAP_FLAG`].
    pub fn flagged(&self) -> bool {
        !(self.extreme_gap() <= LIMIT_GAP_FLAG)
    }

    pub fn passed(&self) -> bool {
        !self.flagged() && self.gaps_monotone
    }
}

fn column_integral(table: &SpaceTimeTable, j: usize, period: f64) -> f64 {
    let col: Vec<f64> = table.rows().map(|r| r[j]).collect();
    trapezoid(&col, period)
}

/// Time integral of `β` over time integral of `γ` at node `j`.
fn local_ratio(beta: &SpaceTimeTable, gamma: &SpaceTimeTable, j: usize, period: f64) -> f64 {
    column_integral(beta, j, period) / column_integral(gamma, j, period)
}

/// The analytic limit of R0 for the given kind, by quadrature on the
/// configuration's space-time grid.
///
/// - `d_I → 0`: `max_y ∫β(ρ(t)y)dt / ∫γ(ρ(t)y)dt`, attained at `y = L` when β
///   rises and γ falls with z and at `y = 0` in the mirrored case.
/// - `d_I → ∞`: `∫∫β / ∫∫γ`.
/// - `L → 0`: `∫β(0)dt / ∫γ(0)dt`.
/// - `L → ∞`: `∫β∞dt / ∫γ∞dt`; not applicable unless both profiles have a
///   finite far field.
pub fn limit_targets(config: &ModelConfig, kind: LimitKind) -> Result<f64> {
    let tables = CoefficientTables::new(config);
    let period = tables.rate.period;
    let (beta, gamma) = (&tables.beta, &tables.gamma);
    let last = tables.grid.nodes() - 1;
    let target = match kind {
        LimitKind::SmallDiffusion => match sign_condition(&tables) {
            Some(GradientSign::Increasing) => local_ratio(beta, gamma, last, period),
            Some(GradientSign::Decreasing) => local_ratio(beta, gamma, 0, period),
            None => (0..=last)
                .map(|j| local_ratio(beta, gamma, j, period))
                .fold(f64::NEG_INFINITY, f64::max),
        },
        LimitKind::LargeDiffusion => {
            let grid = tables.grid;
            let space = |t: &SpaceTimeTable| -> Vec<f64> {
                t.rows()
                    .map(|r| r.iter().enumerate().map(|(j, v)| grid.weight(j) * v).sum())
                    .collect()
            };
            trapezoid(&space(beta), period) / trapezoid(&space(gamma), period)
        }
        LimitKind::SmallLength => local_ratio(beta, gamma, 0, period),
        LimitKind::LargeLength => {
            let rate = &tables.rate;
            let far = |p: &crate::model::CoefficientProfile, name: &str| -> Result<Vec<f64>> {
                rate.times
                    .iter()
                    .zip(&rate.values)
                    .map(|(&t, &r)| {
                        p.far_field_at(r, period, t).ok_or_else(|| {
                            Error::NotApplicable(format!("{name} has no finite limit as z → ∞"))
                        })
                    })
                    .collect()
            };
            let b = far(&config.beta, "beta")?;
            let g = far(&config.gamma, "gamma")?;
            trapezoid(&b, period) / trapezoid(&g, period)
        }
    };
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::NotApplicable(format!(
            "target {target} is not positive"
        )));
    }
    Ok(target)
}

/// R0 along `sequence` and its relative gap to the analytic target.
pub fn verify_limit(
    config: &ModelConfig,
    kind: LimitKind,
    sequence: &[f64],
) -> Result<LimitReport> {
    if sequence.is_empty() || sequence.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::config(
            "sequence",
            "limit sequence must be nonempty, positive and finite",
        ));
    }
    let target = limit_targets(config, kind)?;
    let parameter = kind.parameter();
    let r0 = sequence
        .par_iter()
        .map(|&v| {
            let c = with_parameter(config, parameter, v).validated()?;
            compute_r0(&c).map(|r| r.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let gaps: Vec<f64> = r0.iter().map(|r| (r - target).abs() / target).collect();
    let gaps_monotone = gaps.windows(2).all(|w| w[1] <= w[0] + GAP_SLACK);
    Ok(LimitReport {
        kind,
        samples: sequence.iter().copied().zip(r0).collect(),
        target,
        gaps,
        gaps_monotone,
    })
}
