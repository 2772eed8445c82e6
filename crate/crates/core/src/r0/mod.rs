//! The basic reproduction number.
//!
//! R0 is the value of μ for which the period map of
//! `Φ_t = d_I/ρ²·Φ_yy + (β/μ − γ − n·ρ̇/ρ)·Φ` has spectral radius 1. The
//! spectral radius `r(μ)` decreases strictly in μ, and `ln r` is convex in
//! `1/μ`, so the root is bracketed by the space-time min/max bounds and then
//! found by a safeguarded secant (Illinois) iteration in `1/μ`.

mod certificate;
mod elliptic;
mod spectral;

pub use certificate::{
    eigenfunction_monotonicity_certificate, sign_condition, Certificate, GradientSign,
};
pub use elliptic::{neumann_elliptic_principal_eigenvalue, SymTridiagonal};
pub use spectral::{
    assemble_period_map, assembled_spectral_radius, period_map_spectral_radius,
    principal_periodic_eigenvalue_general, spectral_radius_with, SpectralMethod, SpectralOptions,
    SpectralRadius,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    CoefficientProfile, CoefficientTables, EvolutionRate, Field, Grid1D, ModelConfig,
    PeriodicOrbit, RateSamples, SpaceTimeTable,
};
use crate::pde::{LinearEquationSpec, TimeDirection};
use crate::quadrature::{mean_inverse_rho_squared, trapezoid};

/// Intervals used for time quadrature of closed-form expressions.
pub const CLOSED_FORM_INTERVALS: usize = 1024;

/// How λ* of the separable reduction is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaStarConvention {
    /// Principal eigenvalue of `−d_I·u'' + c·u` with Neumann ends
    /// (λ* = c for constant c).
    Neumann,
    /// The Neumann value shifted by `d_I·(π/L)²`, giving `λ* = c + d_I·π²`
    /// for constant c on the unit interval.
    #[default]
    PaperExample,
}

impl LambdaStarConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Neumann => "neumann",
            Self::PaperExample => "paper-example",
        }
    }

    pub fn lambda_star(self, c: &CoefficientProfile, d_i: f64, grid: &Grid1D) -> f64 {
        let neumann = if c.is_constant() {
            c.profile(0.0)
        } else {
            neumann_elliptic_principal_eigenvalue(c, d_i, grid)
        };
        match self {
            Self::Neumann => neumann,
            Self::PaperExample => neumann + d_i * (PI / grid.length()).powi(2),
        }
    }
}

impl std::str::FromStr for LambdaStarConvention {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "neumann" => Ok(Self::Neumann),
            "paper-example" => Ok(Self::PaperExample),
            other => Err(format!("unknown lambda* convention '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R0Options {
    /// Stop when `|r(μ) − 1|` falls below this.
    pub tol: f64,
    pub max_iterations: usize,
    pub direction: TimeDirection,
    /// Start each power iteration from the previous eigenvector.
    pub warm_start: bool,
    pub spectral: SpectralOptions,
}

impl Default for R0Options {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iterations: 100,
            direction: TimeDirection::Forward,
            warm_start: true,
            spectral: SpectralOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct R0Result {
    pub value: f64,
    /// Bracket on μ in which the root was located.
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// `|r(R0) − 1|`.
    pub defect: f64,
    /// Φ over one period, sup-normalized to 1 at `t = 0`.
    pub eigenfunction: PeriodicOrbit,
    pub method: SpectralMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsResult {
    pub lower: f64,
    pub upper: f64,
    pub int_min_beta: f64,
    pub int_max_beta: f64,
    pub int_min_gamma: f64,
    pub int_max_gamma: f64,
}

/// The infected-class eigenproblem of a configuration, with `1/μ` as parameter.
#[derive(Debug, Clone)]
pub struct InfectionProblem {
    base: LinearEquationSpec,
    beta: SpaceTimeTable,
    /// `γ + n·ρ̇/ρ`
    loss: SpaceTimeTable,
    bounds: BoundsResult,
}

impl InfectionProblem {
    pub fn new(config: &ModelConfig) -> Self {
        let (grid, rate, beta, gamma) = CoefficientTables::infection(config);
        Self::from_tables(config.d_i, grid, &rate, beta, gamma)
    }

    pub fn from_tables(
        d_i: f64,
        grid: Grid1D,
        rate: &RateSamples,
        beta: SpaceTimeTable,
        gamma: SpaceTimeTable,
    ) -> Self {
        let bounds = bounds_from_tables(&beta, &gamma, rate.period);
        let mut loss = gamma;
        loss.add_rowwise(&rate.dilution);
        let base = LinearEquationSpec::from_samples(d_i, rate, grid, loss.map(|v| -v));
        Self {
            base,
            beta,
            loss,
            bounds,
        }
    }

    pub fn bounds(&self) -> BoundsResult {
        self.bounds
    }

    /// Spec with potential `β/μ − γ − n·ρ̇/ρ`.
    pub fn spec_for(&self, mu: f64) -> LinearEquationSpec {
        self.base
            .with_potential(self.beta.combine(1.0 / mu, &self.loss, -1.0))
    }

    /// Spec with potential `β − γ − n·ρ̇/ρ`, whose Floquet exponent has the
    /// sign of `1 − R0`.
    pub fn threshold_spec(&self) -> LinearEquationSpec {
        self.spec_for(1.0)
    }
}

/// `R0 = β̂ / (λ*·mean(ρ⁻²))`.
pub fn r0_closed_form(beta_hat: f64, lambda_star: f64, rho: &EvolutionRate) -> Result<f64> {
    Ok(beta_hat / (lambda_star * mean_inverse_rho_squared(rho, CLOSED_FORM_INTERVALS)?))
}

/// R0 for constant β and `γ = c/ρ²(t) + g(t)` with constant c:
/// `β̂ / (c·mean ρ⁻² + mean g)`. `None` for any other configuration.
pub fn separable_closed_form(config: &ModelConfig) -> Option<Result<f64>> {
    if !config.beta.is_constant() {
        return None;
    }
    let CoefficientProfile::Separable { c, g } = &config.gamma else {
        return None;
    };
    if !c.is_constant() {
        return None;
    }
    let beta_hat = config.beta.profile(0.0);
    let mean_g = g.mean
        + g.cosines
            .iter()
            .filter(|(k, _)| *k == 0)
            .map(|(_, a)| a)
            .sum::<f64>();
    Some(
        mean_inverse_rho_squared(&config.rho, CLOSED_FORM_INTERVALS)
            .map(|m| beta_hat / (c.profile(0.0) * m + mean_g)),
    )
}

fn bounds_from_tables(beta: &SpaceTimeTable, gamma: &SpaceTimeTable, period: f64) -> BoundsResult {
    let min_of = |row: &[f64]| row.iter().copied().fold(f64::INFINITY, f64::min);
    let max_of = |row: &[f64]| row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let series =
        |t: &SpaceTimeTable, f: &dyn Fn(&[f64]) -> f64| -> Vec<f64> { t.rows().map(f).collect() };
    let int_min_beta = trapezoid(&series(beta, &min_of), period);
    let int_max_beta = trapezoid(&series(beta, &max_of), period);
    let int_min_gamma = trapezoid(&series(gamma, &min_of), period);
    let int_max_gamma = trapezoid(&series(gamma, &max_of), period);
    BoundsResult {
        lower: int_min_beta / int_max_gamma,
        upper: int_max_beta / int_min_gamma,
        int_min_beta,
        int_max_beta,
        int_min_gamma,
        int_max_gamma,
    }
}

/// `∫ min_y β dt / ∫ max_y γ dt ≤ R0 ≤ ∫ max_y β dt / ∫ min_y γ dt`, with the
/// extrema over grid nodes at every time node.
pub fn r0_bounds(config: &ModelConfig) -> BoundsResult {
    let (_, rate, beta, gamma) = CoefficientTables::infection(config);
    bounds_from_tables(&beta, &gamma, rate.period)
}

pub fn compute_r0(config: &ModelConfig) -> Result<R0Result> {
    compute_r0_with(config, &R0Options::default())
}

pub fn compute_r0_with(config: &ModelConfig, options: &R0Options) -> Result<R0Result> {
    InfectionProblem::new(config).solve(options)
}

struct Evaluation {
    log_r: f64,
    radius: SpectralRadius,
}

impl InfectionProblem {
    fn evaluate(&self, s: f64, start: Option<&Field>, options: &R0Options) -> Result<Evaluation> {
        let spec = self.spec_for(1.0 / s);
        let start = if options.warm_start { start } else { None };
        let radius = spectral_radius_with(&spec, options.direction, start, &options.spectral)?;
        Ok(Evaluation {
            log_r: radius.value.ln(),
            radius,
        })
    }

    pub fn solve(&self, options: &R0Options) -> Result<R0Result> {
        const MAX_EXPANSIONS: usize = 6;
        let log_tol = options.tol;
        // f(s) = ln r(1/s) is increasing in s = 1/μ.
        let mut s_lo = 1.0 / self.bounds.upper;
        let mut s_hi = 1.0 / self.bounds.lower;
        let mut f_lo = self.evaluate(s_lo, None, options)?;
        let mut iterations = 1;
        let mut expansions = 0;
        while f_lo.log_r > 0.0 {
            if f_lo.log_r.abs() <= log_tol {
                return self.finish(s_lo, (1.0 / s_hi, 1.0 / s_lo), f_lo, iterations, options);
            }
            if expansions == MAX_EXPANSIONS {
                return Err(Error::Bracket { expansions });
            }
            s_hi = s_lo;
            s_lo *= 0.5;
            expansions += 1;
            f_lo = self.evaluate(s_lo, Some(&f_lo.radius.eigenvector), options)?;
            iterations += 1;
        }
        if f_lo.log_r.abs() <= log_tol {
            return self.finish(s_lo, (1.0 / s_hi, 1.0 / s_lo), f_lo, iterations, options);
        }
        let mut f_hi = self.evaluate(s_hi, Some(&f_lo.radius.eigenvector), options)?;
        iterations += 1;
        expansions = 0;
        while f_hi.log_r < 0.0 {
            if f_hi.log_r.abs() <= log_tol {
                return self.finish(s_hi, (1.0 / s_hi, 1.0 / s_lo), f_hi, iterations, options);
            }
            if expansions == MAX_EXPANSIONS {
                return Err(Error::Bracket { expansions });
            }
            s_lo = s_hi;
            f_lo = f_hi;
            s_hi *= 2.0;
            expansions += 1;
            f_hi = self.evaluate(s_hi, Some(&f_lo.radius.eigenvector), options)?;
            iterations += 1;
        }
        let bracket = (1.0 / s_hi, 1.0 / s_lo);
        if f_hi.log_r.abs() <= log_tol {
            return self.finish(s_hi, bracket, f_hi, iterations, options);
        }

        // Illinois regula falsi; falls back to bisection when the secant
        // point leaves the interior of the bracket.
        let mut side = 0i8;
        let (mut flo, mut fhi) = (f_lo.log_r, f_hi.log_r);
        let mut last_vec = f_hi.radius.eigenvector.clone();
        for _ in 0..options.max_iterations {
            let mut s = (s_lo * fhi - s_hi * flo) / (fhi - flo);
            if !(s > s_lo && s < s_hi) {
                s = 0.5 * (s_lo + s_hi);
            }
            let eval = self.evaluate(s, Some(&last_vec), options)?;
            iterations += 1;
            if eval.log_r.abs() <= log_tol || (s_hi - s_lo) <= 1e-15 * s_hi {
                return self.finish(s, bracket, eval, iterations, options);
            }
            last_vec = eval.radius.eigenvector.clone();
            if eval.log_r < 0.0 {
                s_lo = s;
                flo = eval.log_r;
                if side == -1 {
                    fhi *= 0.5;
                }
                side = -1;
            } else {
                s_hi = s;
                fhi = eval.log_r;
                if side == 1 {
                    flo *= 0.5;
                }
                side = 1;
            }
        }
        Err(Error::NoConvergence {
            what: "R0 root finding",
            iterations: options.max_iterations,
            defect: flo.abs().min(fhi.abs()),
        })
    }

    fn finish(
        &self,
        s: f64,
        bracket: (f64, f64),
        eval: Evaluation,
        iterations: usize,
        options: &R0Options,
    ) -> Result<R0Result> {
        let spec = self.spec_for(1.0 / s);
        let mut orbit = spec.advance_recording(&eval.radius.eigenvector, options.direction)?;
        let norm = orbit.slices[0].sup_norm();
        for slice in &mut orbit.slices {
            slice.scale(1.0 / norm);
        }
        Ok(R0Result {
            value: 1.0 / s,
            bracket,
            iterations,
            defect: (eval.radius.value - 1.0).abs(),
            eigenfunction: orbit,
            method: eval.radius.method,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{preset, Preset};

    fn small(p: Preset) -> ModelConfig {
        let mut c = preset(p, LambdaStarConvention::PaperExample);
        c.grid_points = 40;
        c.steps_per_period = 400;
        c
    }

    #[test]
    fn constant_coefficients_give_beta_over_gamma() {
        let r = compute_r0(&small(Preset::Constant)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
        assert!(r.defect <= 1e-8);
    }

    #[test]
    fn separable_gamma_matches_closed_form() {
        for p in [
            Preset::Example1Evolving,
            Preset::Example2Evolving,
            Preset::Example3B,
        ] {
            let mut c = small(p);
            c.steps_per_period = 2000;
            let (beta, _, _) = p.separable_data().unwrap();
            let lambda_star = match &c.gamma {
                CoefficientProfile::Separable { c, .. } => c.profile(0.0),
                _ => unreachable!(),
            };
            let closed = r0_closed_form(beta, lambda_star, &c.rho).unwrap();
            let r = compute_r0(&c).unwrap();
            assert!(
                (r.value - closed).abs() < 1e-6 * closed,
                "{p}: {} vs {closed}",
                r.value
            );
        }
    }

    #[test]
    fn closed_form_detection() {
        let c = small(Preset::Example3B);
        let closed = separable_closed_form(&c).unwrap().unwrap();
        let direct = r0_closed_form(7.0, 11.8 + 0.8 * PI * PI, &c.rho).unwrap();
        assert!((closed - direct).abs() < 1e-14);
        assert!(separable_closed_form(&small(Preset::Example4A)).is_none());
        assert!(separable_closed_form(&small(Preset::Constant)).is_none());
    }

    #[test]
    fn closed_form_on_fixed_domain() {
        let rho = EvolutionRate::constant_one(1.0);
        let r = r0_closed_form(7.0, 6.96 + 0.1 * PI * PI, &rho).unwrap();
        assert!((r - 0.8808).abs() < 1e-3);
    }

    #[test]
    fn convention_shift() {
        let grid = Grid1D::new(2.0, 50);
        let c = CoefficientProfile::affine(0.3, 0.2);
        let n = LambdaStarConvention::Neumann.lambda_star(&c, 0.1, &grid);
        let p = LambdaStarConvention::PaperExample.lambda_star(&c, 0.1, &grid);
        assert!((p - n - 0.1 * PI * PI / 4.0).abs() < 1e-12);
        assert_eq!(
            "neumann".parse::<LambdaStarConvention>().unwrap(),
            LambdaStarConvention::Neumann
        );
        assert!("dirichlet".parse::<LambdaStarConvention>().is_err());
    }

    #[test]
    fn heterogeneous_r0_is_sandwiched_and_matches_sweep_oracle() {
        let c = small(Preset::Example4B);
        let problem = InfectionProblem::new(&c);
        let r = problem.solve(&R0Options::default()).unwrap();
        let b = problem.bounds();
        assert!(b.lower <= r.value && r.value <= b.upper);

        // Tabulate r(μ) on a fine grid and interpolate r = 1 linearly in ln r.
        let (lo, hi) = (b.lower, b.upper);
        let n = 200;
        let log_r = |mu: f64| {
            period_map_spectral_radius(&problem.spec_for(mu), TimeDirection::Forward)
                .unwrap()
                .ln()
        };
        let mut prev = (lo, log_r(lo));
        let mut oracle = f64::NAN;
        for k in 1..=n {
            let mu = lo + (hi - lo) * k as f64 / n as f64;
            let cur = (mu, log_r(mu));
            if prev.1 >= 0.0 && cur.1 <= 0.0 {
                oracle = prev.0 + (cur.0 - prev.0) * prev.1 / (prev.1 - cur.1);
                break;
            }
            prev = cur;
        }
        assert!((r.value - oracle).abs() < 1e-5, "{} vs {oracle}", r.value);
    }

    #[test]
    fn backward_map_and_cold_start_agree() {
        let c = small(Preset::Mirrored);
        let forward = compute_r0(&c).unwrap().value;
        let backward = compute_r0_with(
            &c,
            &R0Options {
                direction: TimeDirection::Backward,
                warm_start: false,
                ..R0Options::default()
            },
        )
        .unwrap()
        .value;
        assert!((forward - backward).abs() < 1e-6);
    }

    #[test]
    fn eigenfunction_is_periodic_positive_and_fixed_by_the_map() {
        let c = small(Preset::Example4A);
        let problem = InfectionProblem::new(&c);
        let r = problem.solve(&R0Options::default()).unwrap();
        let phi = &r.eigenfunction;
        assert!((phi.slices[0].sup_norm() - 1.0).abs() < 1e-15);
        assert!(phi.min() > 0.0);
        assert!(phi.closure_defect() < 1e-6);
        let mapped = problem
            .spec_for(r.value)
            .advance_one_period(&phi.slices[0], TimeDirection::Forward)
            .unwrap();
        assert!((mapped.sup_norm() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn threshold_exponent_has_the_sign_of_one_minus_r0() {
        for p in [
            Preset::Example1Fixed,
            Preset::Example1Evolving,
            Preset::Example4A,
            Preset::Example4B,
        ] {
            let c = small(p);
            let problem = InfectionProblem::new(&c);
            let r0 = problem.solve(&R0Options::default()).unwrap().value;
            let lambda0 = principal_periodic_eigenvalue_general(&problem.threshold_spec()).unwrap();
            assert_eq!((1.0 - r0).signum(), lambda0.signum(), "{p}");
        }
    }

    #[test]
    fn certificate_reports_gradient_sign() {
        let c = small(Preset::Monotone);
        let r = compute_r0(&c).unwrap();
        let cert = eigenfunction_monotonicity_certificate(&r, &c);
        assert_eq!(cert.expected, Some(GradientSign::Increasing));
        assert!(
            cert.passed(),
            "{:?}",
            &cert.violations[..cert.violations.len().min(5)]
        );

        let c = small(Preset::Mirrored);
        let cert = eigenfunction_monotonicity_certificate(&compute_r0(&c).unwrap(), &c);
        assert_eq!(cert.expected, Some(GradientSign::Decreasing));
        assert!(cert.passed());

        let c = small(Preset::Constant);
        let cert = eigenfunction_monotonicity_certificate(&compute_r0(&c).unwrap(), &c);
        assert!(!cert.applicable());
        assert_eq!(cert.checked, 0);
    }
}
