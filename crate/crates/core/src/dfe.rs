//! The positive periodic disease-free state `S*(y, t)`.
//!
//! `S*` is the limit of the period map of
//! `S_t = d_S/ρ²·S_yy + a·S − b·S² − n·ρ̇/ρ·S`, iterated from a constant
//! supersolution (monotone decreasing) and, as a uniqueness check, from a
//! small constant subsolution.

use crate::error::{Error, Result};
use crate::model::{CoefficientTables, Field, ModelConfig, PeriodicOrbit};
use crate::pde::SisStepper;

pub const DEFAULT_DFE_TOL: f64 = 1e-9;
pub const DEFAULT_DFE_MAX_PERIODS: usize = 500;

/// Slack allowed on the monotone decrease of the upper iteration.
const MONOTONE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct DfeResult {
    pub orbit: PeriodicOrbit,
    /// Periods iterated from the upper start.
    pub iterations: usize,
    /// `sup |S(·, (i+1)T) − S(·, iT)|` at the last iteration.
    pub residual: f64,
    /// `sup |S_upper − S_lower|` between the two limits at `t = 0`.
    pub bracket_gap: f64,
    pub upper_start: f64,
    pub lower_start: f64,
    /// `sup S` at `t = iT` along the upper iteration.
    pub upper_sups: Vec<f64>,
    /// Whether `upper_sups` never increased by more than 1e-10.
    pub monotone: bool,
}

struct Run {
    start: Field,
    iterations: usize,
    residual: f64,
    sups: Vec<f64>,
}

fn table_extreme(t: &crate::model::SpaceTimeTable, max: bool) -> f64 {
    let init = if max {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    t.rows()
        .flatten()
        .fold(init, |acc, &v| if max { acc.max(v) } else { acc.min(v) })
}

fn iterate(
    config: &ModelConfig,
    tables: &CoefficientTables,
    start: f64,
    tol: f64,
    max_periods: usize,
) -> Result<Run> {
    let grid = tables.grid;
    let steps = tables.rate.steps();
    let mut stepper = SisStepper::new(config, tables);
    let mut s = Field::constant(grid.nodes(), start);
    let mut zero = Field::constant(grid.nodes(), 0.0);
    let mut sups = vec![s.sup_norm()];
    let mut residual = f64::INFINITY;
    for i in 1..=max_periods {
        let prev = s.clone();
        for m in 0..steps {
            stepper.step(&mut s, &mut zero, m)?;
        }
        residual = s.sup_distance(&prev);
        sups.push(s.sup_norm());
        if residual < tol {
            return Ok(Run {
                start: s,
                iterations: i,
                residual,
                sups,
            });
        }
    }
    Err(Error::NoConvergence {
        what: "disease-free period map",
        iterations: max_periods,
        defect: residual,
    })
}

pub fn solve_dfe(config: &ModelConfig, tol: f64) -> Result<DfeResult> {
    solve_dfe_with(config, tol, DEFAULT_DFE_MAX_PERIODS)
}

pub fn solve_dfe_with(config: &ModelConfig, tol: f64, max_periods: usize) -> Result<DfeResult> {
    let tables = CoefficientTables::new(config);
    let sup_a = table_extreme(&tables.a, true);
    let inf_a = table_extreme(&tables.a, false);
    let sup_b = table_extreme(&tables.b, true);
    let inf_b = table_extreme(&tables.b, false);
    let sup_dil = tables
        .rate
        .dilution
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
    let upper_start = 2.0 * sup_a / inf_b + sup_dil / inf_b;
    let lower_start = 1e-3 * inf_a / sup_b;

    let upper = iterate(config, &tables, upper_start, tol, max_periods)?;
    let lower = iterate(config, &tables, lower_start, tol, max_periods)?;
    let bracket_gap = upper.start.sup_distance(&lower.start);
    if bracket_gap > 10.0 * tol {
        return Err(Error::DfeUniqueness {
            gap: bracket_gap,
            tolerance: 10.0 * tol,
        });
    }
    let monotone = upper.sups.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);

    let mut stepper = SisStepper::new(config, &tables);
    let dt = stepper.dt();
    let mut s = upper.start;
    let mut zero = Field::constant(tables.grid.nodes(), 0.0);
    let mut slices = vec![s.clone()];
    for m in 0..tables.rate.steps() {
        stepper.step(&mut s, &mut zero, m)?;
        slices.push(s.clone());
    }
    Ok(DfeResult {
        orbit: PeriodicOrbit {
            times: (0..slices.len()).map(|m| m as f64 * dt).collect(),
            slices,
        },
        iterations: upper.iterations,
        residual: upper.residual,
        bracket_gap,
        upper_start,
        lower_start,
        upper_sups: upper.sups,
        monotone,
    })
}
