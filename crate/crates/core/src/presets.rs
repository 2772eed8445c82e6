//! Named problem instances: the worked examples on fixed and periodically
//! evolving domains, plus the presets used by the sweep and limit harnesses.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::model::{CoefficientProfile, EvolutionRate, InitialData, ModelConfig};
pub use crate::r0::LambdaStarConvention;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Example1Fixed,
    Example1Evolving,
    Example2Fixed,
    Example2Evolving,
    Example3A,
    Example3B,
    Example4A,
    Example4B,
    /// β increasing and γ decreasing in z, both with finite limits at infinity.
    Monotone,
    /// β decreasing and γ increasing in z.
    Mirrored,
    /// β = 2, γ = 1 on a fixed domain.
    Constant,
}

impl Preset {
    pub const EXAMPLES: [Preset; 8] = [
        Preset::Example1Fixed,
        Preset::Example1Evolving,
        Preset::Example2Fixed,
        Preset::Example2Evolving,
        Preset::Example3A,
        Preset::Example3B,
        Preset::Example4A,
        Preset::Example4B,
    ];

    pub const ALL: [Preset; 11] = [
        Preset::Example1Fixed,
        Preset::Example1Evolving,
        Preset::Example2Fixed,
        Preset::Example2Evolving,
        Preset::Example3A,
        Preset::Example3B,
        Preset::Example4A,
        Preset::Example4B,
        Preset::Monotone,
        Preset::Mirrored,
        Preset::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Example1Fixed => "example1-fixed",
            Preset::Example1Evolving => "example1-evolving",
            Preset::Example2Fixed => "example2-fixed",
            Preset::Example2Evolving => "example2-evolving",
            Preset::Example3A => "example3-a",
            Preset::Example3B => "example3-b",
            Preset::Example4A => "example4-a",
            Preset::Example4B => "example4-b",
            Preset::Monotone => "monotone",
            Preset::Mirrored => "mirrored",
            Preset::Constant => "constant",
        }
    }

    /// `(β̂, c, d_I)` for presets with constant β and γ = c/ρ²-type infection loss.
    pub fn separable_data(self) -> Option<(f64, f64, f64)> {
        match self {
            Preset::Example1Fixed | Preset::Example1Evolving | Preset::Example3A => {
                Some((7.0, 6.96, 0.1))
            }
            Preset::Example2Fixed | Preset::Example2Evolving => Some((7.0, 5.0, 0.1)),
            Preset::Example3B => Some((7.0, 11.8, 0.8)),
            _ => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                format!(
                    "unknown preset '{s}' (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

pub fn rho_fixed() -> EvolutionRate {
    EvolutionRate::constant_one(PI / 2.0)
}

/// `e^{0.3(1−cos 4t)}`, the larger evolution rate of examples 1 and 3.
pub fn rho_large() -> EvolutionRate {
    EvolutionRate::exp_cosine(0.3, 4.0)
}

/// `e^{−0.15(1−cos 4t)}`, the smaller evolution rate of example 2.
pub fn rho_small() -> EvolutionRate {
    EvolutionRate::exp_cosine(-0.15, 4.0)
}

/// `e^{−0.2(1−cos 2t)}`, period π, used by example 4.
pub fn rho_example4() -> EvolutionRate {
    EvolutionRate::exp_cosine(-0.2, 2.0)
}

fn initial_s() -> InitialData {
    InitialData::cosine(0.3, &[(1, 0.01), (4, 0.01)])
}

fn initial_i() -> InitialData {
    InitialData::cosine(0.3, &[(1, 0.01), (2, 0.01), (3, 0.01)])
}

fn separable_example(
    rho: EvolutionRate,
    c: f64,
    d_i: f64,
    convention: LambdaStarConvention,
) -> ModelConfig {
    let length = 1.0;
    let lambda_star = match convention {
        LambdaStarConvention::Neumann => c,
        LambdaStarConvention::PaperExample => c + d_i * (PI / length).powi(2),
    };
    ModelConfig {
        d_s: 0.01,
        d_i,
        n: 1,
        length,
        rho,
        a: CoefficientProfile::constant(1.0),
        b: CoefficientProfile::constant(10.0),
        beta: CoefficientProfile::constant(7.0),
        gamma: CoefficientProfile::separable(CoefficientProfile::constant(lambda_star)),
        grid_points: crate::model::DEFAULT_GRID_POINTS,
        steps_per_period: crate::model::DEFAULT_STEPS_PER_PERIOD,
        initial_s: initial_s(),
        initial_i: initial_i(),
        work_budget: None,
    }
}

fn heterogeneous(beta: CoefficientProfile, gamma: CoefficientProfile, length: f64) -> ModelConfig {
    ModelConfig {
        d_s: 0.1,
        d_i: 0.1,
        n: 1,
        length,
        rho: rho_example4(),
        a: CoefficientProfile::constant(1.0),
        b: CoefficientProfile::constant(1.0),
        beta,
        gamma,
        grid_points: crate::model::DEFAULT_GRID_POINTS,
        steps_per_period: crate::model::DEFAULT_STEPS_PER_PERIOD,
        initial_s: initial_s(),
        initial_i: initial_i(),
        work_budget: None,
    }
}

/// Builds a preset. The convention only affects presets whose γ is the
/// separable `λ*/ρ²(t)`.
pub fn preset(which: Preset, convention: LambdaStarConvention) -> ModelConfig {
    let example4_beta = CoefficientProfile::exponential(0.33, 0.01, -0.01);
    match which {
        Preset::Example1Fixed => separable_example(rho_fixed(), 6.96, 0.1, convention),
        Preset::Example1Evolving | Preset::Example3A => {
            separable_example(rho_large(), 6.96, 0.1, convention)
        }
        Preset::Example2Fixed => separable_example(rho_fixed(), 5.0, 0.1, convention),
        Preset::Example2Evolving => separable_example(rho_small(), 5.0, 0.1, convention),
        Preset::Example3B => separable_example(rho_large(), 11.8, 0.8, convention),
        Preset::Example4A => {
            heterogeneous(example4_beta, CoefficientProfile::affine(0.35, 0.88), 1.0)
        }
        Preset::Example4B => {
            heterogeneous(example4_beta, CoefficientProfile::affine(0.31, 0.01), 2.0)
        }
        Preset::Monotone => heterogeneous(
            CoefficientProfile::exponential(0.35, -0.1, -1.0),
            CoefficientProfile::exponential(0.25, 0.15, -1.0),
            1.0,
        ),
        Preset::Mirrored => heterogeneous(
            CoefficientProfile::exponential(0.25, 0.1, -1.0),
            CoefficientProfile::exponential(0.4, -0.15, -1.0),
            1.0,
        ),
        Preset::Constant => ModelConfig {
            beta: CoefficientProfile::constant(2.0),
            gamma: CoefficientProfile::constant(1.0),
            ..separable_example(rho_fixed(), 1.0, 0.1, LambdaStarConvention::Neumann)
        },
    }
}
