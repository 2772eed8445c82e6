use super::R0Result;
use crate::model::{CoefficientTables, ModelConfig, SpaceTimeTable};

/// Per-node slack for the discrete sign conditions on β and γ.
const SIGN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientSign {
    /// γ strictly decreasing and β nondecreasing in y: expect Φ_y > 0.
    Increasing,
    /// γ nondecreasing and β strictly decreasing in y: expect Φ_y < 0.
    Decreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// `None` when neither sign condition holds on the grid.
    pub expected: Option<GradientSign>,
    /// `(time index, node, central difference)` of each wrong-signed gradient.
    pub violations: Vec<(usize, usize, f64)>,
    pub checked: usize,
}

impl Certificate {
    pub fn applicable(&self) -> bool {
        self.expected.is_some()
    }

    pub fn passed(&self) -> bool {
        self.applicable() && self.violations.is_empty()
    }
}

fn monotone(table: &SpaceTimeTable, strict: bool, increasing: bool) -> bool {
    table.rows().all(|row| {
        row.windows(2).all(|w| {
            let diff = if increasing { w[1] - w[0] } else { w[0] - w[1] };
            if strict {
                diff > SIGN_SLACK
            } else {
                diff >= -SIGN_SLACK
            }
        })
    })
}

/// Which sign condition, if any, the coefficients satisfy on every time slice.
pub fn sign_condition(tables: &CoefficientTables) -> Option<GradientSign> {
    sign_condition_of(&tables.beta, &tables.gamma)
}

pub(crate) fn sign_condition_of(
    beta: &SpaceTimeTable,
    gamma: &SpaceTimeTable,
) -> Option<GradientSign> {
    if monotone(gamma, true, false) && monotone(beta, false, true) {
        Some(GradientSign::Increasing)
    } else if monotone(gamma, false, true) && monotone(beta, true, false) {
        Some(GradientSign::Decreasing)
    } else {
        None
    }
}

/// Checks the sign of `Φ_{j+1} − Φ_{j−1}` at every interior node of every slice.
pub fn eigenfunction_monotonicity_certificate(
    result: &R0Result,
    config: &ModelConfig,
) -> Certificate {
    let (_, _, beta, gamma) = CoefficientTables::infection(config);
    let expected = sign_condition_of(&beta, &gamma);
    let mut violations = Vec::new();
    let mut checked = 0;
    if let Some(sign) = expected {
        for (m, slice) in result.eigenfunction.slices.iter().enumerate() {
            for j in 1..slice.len() - 1 {
                let grad = slice[j + 1] - slice[j - 1];
                checked += 1;
                let ok = match sign {
                    GradientSign::Increasing => grad > 0.0,
                    GradientSign::Decreasing => grad < 0.0,
                };
                if !ok {
                    violations.push((m, j, grad));
                }
            }
        }
    }
    Certificate {
        expected,
        violations,
        checked,
    }
}
