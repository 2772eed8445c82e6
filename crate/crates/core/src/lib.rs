//! SIS reaction–diffusion epidemics with logistic susceptible growth on a
//! periodically evolving interval.
//!
//! The evolving domain `(0, ρ(t)L)` is pulled back to the fixed interval
//! `(0, L)`. On it the crate
//!
//! - simulates the coupled susceptible/infected system ([`pde`]),
//! - computes the periodic disease-free equilibrium ([`dfe`]),
//! - computes the basic reproduction number as the principal eigenvalue of
//!   the periodic-parabolic problem for the infected class, together with
//!   its closed form, bounds and eigenfunction ([`r0`]),
//! - runs parameter sweeps, limit studies and threshold classification
//!   ([`analysis`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dfe;
pub mod error;
pub mod model;
pub mod pde;
pub mod presets;
pub mod quadrature;
pub mod r0;
pub mod report;

pub use error::{Error, Result};
