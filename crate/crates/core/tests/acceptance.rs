//! Acceptance suite: one PASS/FAIL line per criterion, with the numbers
//! behind each verdict. Exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use evosis::analysis::{
    classify_stability, sweep_L, sweep_dI, verify_limit, Classification, LimitKind, MonotoneVerdict,
};
use evosis::dfe::solve_dfe;
use evosis::model::{CoefficientProfile, EvolutionRate, ModelConfig};
use evosis::pde::{simulate, SimulationOptions, TimeDirection};
use evosis::presets::{preset, rho_example4, rho_large, rho_small, LambdaStarConvention, Preset};
use evosis::quadrature::mean_inverse_rho_squared;
use evosis::r0::{
    compute_r0, period_map_spectral_radius, principal_periodic_eigenvalue_general, r0_bounds,
    r0_closed_form, InfectionProblem, R0Options,
};

const PAPER: LambdaStarConvention = LambdaStarConvention::PaperExample;

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines
            .push(format!("    [{}] {line}", if ok { "ok" } else { "FAIL" }));
    }
}

fn lambda_star_of(config: &ModelConfig) -> f64 {
    match &config.gamma {
        CoefficientProfile::Separable { c, .. } => c.profile(0.0),
        _ => panic!("preset without separable gamma"),
    }
}

/// Criterion 1: Closed-form R0 of examples 1–3 against the published values, |Δ| ≤ 1e-3.
fn closed_form_reproduction() -> Outcome {
    let mut out = Outcome::new();
    let cases = [
        (Preset::Example1Fixed, 0.8808),
        (Preset::Example1Evolving, 1.5749),
        (Preset::Example2Fixed, 1.1692),
        (Preset::Example2Evolving, 0.8470),
        (Preset::Example3A, 1.5749),
        (Preset::Example3B, 0.6355),
    ];
    for (p, reference) in cases {
        let config = preset(p, PAPER);
        let (beta, _, _) = p.separable_data().unwrap();
        let start = Instant::now();
        let r0 = r0_closed_form(beta, lambda_star_of(&config), &config.rho).unwrap();
        let elapsed = start.elapsed();
        out.check(
            (r0 - reference).abs() <= 1e-3 && elapsed < Duration::from_millis(50),
            format!(
                "{p}: computed {r0:.6}, published {reference}, |Δ| = {:.2e}, {elapsed:?}",
                (r0 - reference).abs()
            ),
        );
    }
    out
}

/// Criterion 2: Mean of ρ⁻² for the two evolution rates of examples 1–3, to 1e-3 with M ≥ 256.
fn quadrature_reproduction() -> Outcome {
    let mut out = Outcome::new();
    for (name, rho, reference) in [
        ("e^{0.3(1-cos 4t)}", rho_large(), 0.5593),
        ("e^{-0.15(1-cos 4t)}", rho_small(), 1.3804),
    ] {
        for m in [256, 1024] {
            let v = mean_inverse_rho_squared(&rho, m).unwrap();
            out.check(
                (v - reference).abs() <= 1e-3,
                format!(
                    "{name}, M = {m}: computed {v:.6}, published {reference}, |Δ| = {:.2e}",
                    (v - reference).abs()
                ),
            );
        }
    }
    out
}

/// Criterion 3: The four quadrature components of the example 4 bounds, each to 1e-3.
fn bounds_reproduction() -> Outcome {
    let mut out = Outcome::new();
    let a = r0_bounds(&preset(Preset::Example4A, PAPER));
    let b = r0_bounds(&preset(Preset::Example4B, PAPER));
    for (name, computed, reference) in [
        ("example4-a ∫ min β", a.int_min_beta, 1.0679),
        ("example4-a ∫ max γ", a.int_max_gamma, 3.3857),
        ("example4-b ∫ max β", b.int_max_beta, 1.0681),
        ("example4-b ∫ min γ", b.int_min_gamma, 0.9739),
    ] {
        out.check(
            (computed - reference).abs() <= 1e-3,
            format!("{name}: computed {computed:.6}, published {reference}"),
        );
    }
    out.lines.push(format!(
        "    example4-a: {:.4} <= R0 <= {:.4}; example4-b: {:.4} <= R0 <= {:.4}",
        a.lower, a.upper, b.lower, b.upper
    ));
    out
}

/// Period map of the Φ-equation assembled step by step from dense matrices,
/// with coefficients evaluated directly from their formulas.
#[allow(clippy::too_many_arguments)]
fn dense_period_map(
    d: f64,
    length: f64,
    n: usize,
    m: usize,
    amplitude: f64,
    frequency: f64,
    infection: &dyn Fn(f64, f64) -> f64,
    loss: &dyn Fn(f64, f64) -> f64,
    mu: f64,
) -> DMatrix<f64> {
    let period = 2.0 * PI / frequency;
    let dt = period / m as f64;
    let h = length / n as f64;
    let nodes = n + 1;
    let rho = |t: f64| (amplitude * (1.0 - (frequency * t).cos())).exp();
    let log_rate = |t: f64| amplitude * frequency * (frequency * t).sin();
    let q = |y: f64, t: f64| {
        let r = rho(t);
        infection(y, r) / mu - loss(y, r) - log_rate(t)
    };
    let mut lap = DMatrix::<f64>::zeros(nodes, nodes);
    for j in 0..nodes {
        lap[(j, j)] = -2.0;
        if j == 0 {
            lap[(0, 1)] = 2.0;
        } else if j == n {
            lap[(n, n - 1)] = 2.0;
        } else {
            lap[(j, j - 1)] = 1.0;
            lap[(j, j + 1)] = 1.0;
        }
    }
    let identity = DMatrix::<f64>::identity(nodes, nodes);
    let mut map = identity.clone();
    for k in 0..m {
        let (t0, t1) = (k as f64 * dt, (k + 1) as f64 * dt);
        let d_bar = 0.5 * d * (rho(t0).powi(-2) + rho(t1).powi(-2));
        let kappa = 0.5 * dt * d_bar / (h * h);
        let half_q = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            nodes,
            (0..nodes).map(|j| {
                let y = j as f64 * h;
                0.25 * dt * (q(y, t0) + q(y, t1))
            }),
        ));
        let explicit = &identity + &lap * kappa + &half_q;
        let implicit = &identity - &lap * kappa - &half_q;
        map = implicit
            .lu()
            .solve(&(explicit * map))
            .expect("nonsingular step");
    }
    map
}

fn dominant_modulus(map: &DMatrix<f64>) -> f64 {
    map.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Criterion 4: Power-iteration spectral radius against the dense period map, N ≤ 8.
fn dense_oracle() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let ex4a_beta = |z: f64| 0.33 + 0.01 * (-0.01 * z).exp();
    type Case = (
        Preset,
        usize,
        f64,
        f64,
        Box<dyn Fn(f64, f64) -> f64>,
        Box<dyn Fn(f64, f64) -> f64>,
    );
    let cases: Vec<Case> = vec![
        (
            Preset::Example4A,
            4,
            -0.2,
            2.0,
            Box::new(move |y, r| ex4a_beta(r * y)),
            Box::new(|y, r| 0.35 + 0.88 * r * y),
        ),
        (
            Preset::Example4B,
            8,
            -0.2,
            2.0,
            Box::new(move |y, r| ex4a_beta(r * y)),
            Box::new(|y, r| 0.31 + 0.01 * r * y),
        ),
        (
            Preset::Monotone,
            8,
            -0.2,
            2.0,
            Box::new(|y, r| 0.35 - 0.1 * (-r * y).exp()),
            Box::new(|y, r| 0.25 + 0.15 * (-r * y).exp()),
        ),
        (
            Preset::Example1Evolving,
            8,
            0.3,
            4.0,
            Box::new(|_, _| 7.0),
            Box::new(|_, r| (6.96 + 0.1 * PI * PI) / (r * r)),
        ),
    ];
    for (p, n, amplitude, frequency, infection, loss) in cases {
        let mut config = preset(p, PAPER);
        config.grid_points = n;
        config.steps_per_period = 200;
        let problem = InfectionProblem::new(&config);
        let r0 = problem.solve(&R0Options::default()).unwrap().value;
        for mu in [r0, 0.8 * r0, 1.25 * r0] {
            let power =
                period_map_spectral_radius(&problem.spec_for(mu), TimeDirection::Forward).unwrap();
            let dense = dominant_modulus(&dense_period_map(
                config.d_i,
                config.length,
                n,
                200,
                amplitude,
                frequency,
                infection.as_ref(),
                loss.as_ref(),
                mu,
            ));
            let gap = (power - dense).abs();
            let at_root = if mu == r0 { (dense - 1.0).abs() } else { 0.0 };
            out.check(
                gap <= 1e-8 && at_root <= 1e-7,
                format!("{p}, N = {n}, μ = {mu:.6}: power {power:.12}, dense {dense:.12}, |Δ| = {gap:.1e}"),
            );
        }
    }
    let elapsed = start.elapsed();
    out.check(
        elapsed < Duration::from_secs(1),
        format!("runtime {elapsed:?}"),
    );
    out
}

fn constant_config(beta: f64, gamma: f64, d_i: f64) -> ModelConfig {
    let mut c = preset(Preset::Constant, PAPER);
    c.beta = CoefficientProfile::constant(beta);
    c.gamma = CoefficientProfile::constant(gamma);
    c.d_i = d_i;
    c
}

/// Criterion 5: β, γ constant on a fixed domain give R0 = β/γ within 1e-6.
fn constant_identity() -> Outcome {
    let mut out = Outcome::new();
    for (beta, gamma, d) in [
        (2.0, 1.0, 0.1),
        (0.5, 0.8, 1.0),
        (7.0, 6.96, 0.01),
        (1.3, 1.3, 5.0),
    ] {
        let r0 = compute_r0(&constant_config(beta, gamma, d)).unwrap().value;
        out.check(
            (r0 - beta / gamma).abs() <= 1e-6,
            format!(
                "β = {beta}, γ = {gamma}, d_I = {d}: R0 = {r0:.10}, β/γ = {:.10}",
                beta / gamma
            ),
        );
    }
    out
}

/// Criterion 6: Constant β with γ = c₀/ρ²(t) matches the closed form within 1e-6.
fn separable_consistency() -> Outcome {
    let mut out = Outcome::new();
    for (name, rho) in [
        ("ρ = e^{0.3(1-cos 4t)}", rho_large()),
        ("ρ = e^{-0.15(1-cos 4t)}", rho_small()),
        ("ρ = e^{-0.2(1-cos 2t)}", rho_example4()),
    ] {
        for (beta, c0) in [(7.0, 6.96), (0.9, 0.5)] {
            let mut config = preset(Preset::Example1Fixed, LambdaStarConvention::Neumann);
            config.rho = rho.clone();
            config.beta = CoefficientProfile::constant(beta);
            config.gamma = CoefficientProfile::separable(CoefficientProfile::constant(c0));
            let r0 = compute_r0(&config).unwrap().value;
            let closed = r0_closed_form(beta, c0, &rho).unwrap();
            out.check(
                (r0 - closed).abs() <= 1e-6,
                format!("{name}, β = {beta}, c₀ = {c0}: R0 = {r0:.9}, closed form {closed:.9}"),
            );
        }
    }
    out
}

fn random_profile(rng: &mut ChaCha8Rng, increasing_allowed: bool) -> CoefficientProfile {
    let c0 = rng.random_range(0.2..1.0);
    if rng.random_bool(0.5) {
        let c1 = if increasing_allowed {
            rng.random_range(0.0..0.5)
        } else {
            rng.random_range(-0.05..0.5)
        };
        CoefficientProfile::affine(c0, c1)
    } else {
        let c1 = rng.random_range(-0.8 * c0..0.8 * c0);
        CoefficientProfile::exponential(c0, c1, rng.random_range(-2.0..-0.1))
    }
}

/// Criterion 7: R0 lies within the space-time bounds on 20 random smooth configurations.
fn sandwich() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut accepted = 0;
    while accepted < 20 {
        let mut c = preset(Preset::Monotone, PAPER);
        c.beta = random_profile(&mut rng, false);
        c.gamma = random_profile(&mut rng, true);
        c.rho = EvolutionRate::exp_cosine(
            rng.random_range(-0.3..0.3),
            [2.0, 4.0][rng.random_range(0..2)],
        );
        c.length = rng.random_range(0.5..3.0);
        c.d_i = 10f64.powf(rng.random_range(-2.0..0.0));
        c.grid_points = 40;
        c.steps_per_period = 400;
        let Ok(c) = c.validated() else { continue };
        accepted += 1;
        let r0 = compute_r0(&c).unwrap().value;
        let b = r0_bounds(&c);
        let slack = 1e-9 * r0;
        out.check(
            b.lower - slack <= r0 && r0 <= b.upper + slack,
            format!(
                "config {accepted:2}: {:.6} <= {r0:.6} <= {:.6}",
                b.lower, b.upper
            ),
        );
    }
    out
}

/// Criterion 8: sign(1 − R0) = sign(λ0) on every example preset.
fn sign_relation() -> Outcome {
    let mut out = Outcome::new();
    for p in Preset::EXAMPLES {
        let config = preset(p, PAPER);
        let problem = InfectionProblem::new(&config);
        let r0 = problem.solve(&R0Options::default()).unwrap().value;
        let lambda0 = principal_periodic_eigenvalue_general(&problem.threshold_spec()).unwrap();
        out.check(
            (1.0 - r0).signum() == lambda0.signum(),
            format!("{p}: R0 = {r0:.6}, λ0 = {lambda0:+.6e}"),
        );
    }
    out
}

/// Criterion 9: Strict monotonicity of R0 in d_I and L, within one minute.
fn monotonicity() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let d_values = [0.01, 0.1, 1.0, 10.0];
    let l_values = [0.5, 1.0, 2.0, 4.0];
    let cases = [
        (Preset::Monotone, "d_I", MonotoneVerdict::StrictlyDecreasing),
        (Preset::Monotone, "L", MonotoneVerdict::StrictlyIncreasing),
        (Preset::Mirrored, "d_I", MonotoneVerdict::StrictlyDecreasing),
        (Preset::Mirrored, "L", MonotoneVerdict::StrictlyDecreasing),
        (Preset::Constant, "d_I", MonotoneVerdict::Constant),
        (Preset::Constant, "L", MonotoneVerdict::Constant),
    ];
    for (p, parameter, expected) in cases {
        let config = preset(p, PAPER);
        let table = if parameter == "d_I" {
            sweep_dI(&config, &d_values).unwrap()
        } else {
            sweep_L(&config, &l_values).unwrap()
        };
        let r0: Vec<String> = table.r0.iter().map(|r| format!("{r:.6}")).collect();
        out.check(
            table.verdict == expected && table.passed(),
            format!(
                "{p} over {parameter} {:?}: [{}] {}",
                table.values,
                r0.join(", "),
                table.verdict
            ),
        );
    }
    let elapsed = start.elapsed();
    out.check(
        elapsed < Duration::from_secs(60),
        format!("runtime {elapsed:?}"),
    );
    out
}

/// Criterion 10: Relative gap ≤ 5% at the extreme sample of each limit, gaps monotone.
fn limits() -> Outcome {
    let mut out = Outcome::new();
    let config = preset(Preset::Monotone, PAPER);
    for kind in LimitKind::ALL {
        let report = verify_limit(&config, kind, &kind.default_sequence()).unwrap();
        let gaps: Vec<String> = report.gaps.iter().map(|g| format!("{g:.2e}")).collect();
        let (p, r0) = *report.samples.last().unwrap();
        out.check(
            report.passed(),
            format!(
                "{kind}: target {:.6}, R0({p}) = {r0:.6}, gaps [{}], monotone {}",
                report.target,
                gaps.join(", "),
                report.gaps_monotone
            ),
        );
    }
    out
}

/// Criterion 11: Simulated extinction or persistence agrees with sign(R0 − 1).
fn threshold_dynamics() -> Outcome {
    let mut out = Outcome::new();
    for p in Preset::EXAMPLES {
        let config = preset(p, PAPER);
        let start = Instant::now();
        let v = classify_stability(&config, 100).unwrap();
        let elapsed = start.elapsed();
        let reaches = v.classification != Classification::Extinction
            || v.extinction_period.is_some_and(|m| m <= 100);
        out.check(
            v.agrees() == Some(true) && reaches && elapsed < Duration::from_secs(30),
            format!(
                "{p}: R0 = {:.4}, {} (sup I at horizon {:.2e}, late floor {:.2e}, below 1e-4 from period {:?}), {elapsed:.1?}",
                v.r0, v.classification, v.decay_metric, v.persistence_floor, v.extinction_period
            ),
        );
    }
    out
}

/// Criterion 12: Disease-free state: a/b for constant coefficients, agreement of both
/// starts and a monotone upper iteration.
fn disease_free() -> Outcome {
    let mut out = Outcome::new();
    let tol = 1e-9;
    let r = solve_dfe(&preset(Preset::Example1Fixed, PAPER), tol).unwrap();
    let err = r
        .orbit
        .slices
        .iter()
        .map(|s| (s.max() - 0.1).abs().max((s.min() - 0.1).abs()))
        .fold(0.0, f64::max);
    out.check(
        err <= 1e-8,
        format!("constant coefficients: sup |S* − a/b| = {err:.1e}"),
    );
    for p in Preset::ALL {
        match solve_dfe(&preset(p, PAPER), tol) {
            Ok(r) => out.check(
                r.bracket_gap <= 10.0 * tol && r.monotone && r.orbit.min() > 0.0,
                format!(
                    "{p}: two-start gap {:.1e}, monotone {}, {} periods, S* in [{:.6}, {:.6}]",
                    r.bracket_gap,
                    r.monotone,
                    r.iterations,
                    r.orbit.min(),
                    r.orbit.sup_norm()
                ),
            ),
            Err(e) => out.check(false, format!("{p}: {e}")),
        }
    }
    out
}

/// Criterion 13: Qualitative behaviour of the simulated figures: decay to zero, or
/// approach to a positive periodic state.
fn figure_properties() -> Outcome {
    let mut out = Outcome::new();
    let cases = [
        ("figure 1", Preset::Example1Fixed, false),
        ("figure 2", Preset::Example1Evolving, true),
        ("figure 3", Preset::Example2Fixed, true),
        ("figure 4", Preset::Example2Evolving, false),
        ("figure 5", Preset::Example3B, false),
        ("figure 6", Preset::Example4A, false),
        ("figure 7", Preset::Example4B, true),
    ];
    for (figure, p, persists) in cases {
        let config = preset(p, PAPER);
        let traj = simulate(&config, SimulationOptions::periods(100)).unwrap();
        let n = traj.periods.len();
        let (last, prev) = (traj.periods[n - 1].sup_i, traj.periods[n - 2].sup_i);
        if persists {
            let drift = (last - prev).abs() / last;
            out.check(
                last > 1e-3 && drift < 1e-3,
                format!("{figure} ({p}): sup I → {last:.5}, drift over last period {drift:.1e}"),
            );
        } else {
            let t = config.period() * n as f64;
            out.check(
                last < 1e-4,
                format!("{figure} ({p}): sup I = {last:.2e} at t = {t:.0}"),
            );
        }
        out.check(
            traj.clamps == 0,
            format!("{figure}: no clamped undershoots"),
        );
    }
    out
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 13] = [
        ("closed-form R0 reproduction", closed_form_reproduction),
        ("quadrature reproduction", quadrature_reproduction),
        ("bounds reproduction", bounds_reproduction),
        ("eigen-solver dense oracle", dense_oracle),
        ("constant-coefficient identity", constant_identity),
        ("separable-gamma consistency", separable_consistency),
        ("sandwich bounds", sandwich),
        ("sign relation", sign_relation),
        ("monotonicity suites", monotonicity),
        ("limit suites", limits),
        ("threshold dynamics", threshold_dynamics),
        ("disease-free state", disease_free),
        ("figure-level properties", figure_properties),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:2} {verdict}  {name} ({:.1?})",
            start.elapsed()
        );
        for line in &outcome.lines {
            println!("{line}");
        }
        if !outcome.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
