//! Time integration on the fixed reference interval.
//!
//! Diffusion is Crank–Nicolson with ghost-node Neumann ends. Linear problems
//! also take their potential by the implicit trapezoid rule, so every step is
//! self-adjoint in the trapezoid inner product and the backward period map is
//! the exact adjoint of the forward one. The SIS system uses an explicit
//! trapezoidal reaction.

mod coupled;
mod linear;
mod tridiag;

pub use coupled::{
    simulate, simulate_with, step_coupled_sis, PeriodSummary, SimulationOptions, SisStepper,
    Snapshot, Trajectory, DENOMINATOR_GUARD,
};
pub use linear::{LinearEquationSpec, TimeDirection};

use crate::error::Result;
use crate::model::{EvolutionRate, Field, Grid1D};

pub fn step_linear(
    u: &Field,
    spec: &LinearEquationSpec,
    k: usize,
    dir: TimeDirection,
) -> Result<Field> {
    spec.step(u, k, dir)
}

pub fn advance_one_period(
    u: &Field,
    spec: &LinearEquationSpec,
    dir: TimeDirection,
) -> Result<Field> {
    spec.advance_one_period(u, dir)
}

/// Maps nodal values to the evolving domain: `(x_j = ρ(t)·y_j, u_j)`.
pub fn push_forward(u: &Field, grid: &Grid1D, rho: &EvolutionRate, t: f64) -> Vec<(f64, f64)> {
    let r = rho.value(t);
    grid.points()
        .zip(u.iter())
        .map(|(y, &v)| (r * y, v))
        .collect()
}
