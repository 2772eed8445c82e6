use super::tridiag::{neumann_second_difference, Tridiagonal};
use crate::error::{Error, Result};
use crate::model::{EvolutionRate, Field, Grid1D, PeriodicOrbit, RateSamples, SpaceTimeTable};

/// Direction of integration over the period.
///
/// `Backward` integrates `ϑ(y,t) = φ(y,T−t)`: the same equation with the
/// coefficients read at `T − t`, which realizes the adjoint problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeDirection {
    Forward,
    Backward,
}

/// `u_t = d/ρ²(t)·u_yy + q(y,t)·u` on `(0, L)` with Neumann ends, sampled on
/// the `M + 1` time nodes of one period.
#[derive(Debug, Clone)]
pub struct LinearEquationSpec {
    diffusivity: f64,
    grid: Grid1D,
    period: f64,
    inv_rho2: Vec<f64>,
    potential: SpaceTimeTable,
}

impl LinearEquationSpec {
    pub fn new(
        diffusivity: f64,
        rho: &EvolutionRate,
        grid: Grid1D,
        steps: usize,
        potential: impl FnMut(f64, f64) -> f64,
    ) -> Self {
        let rate = RateSamples::new(rho, 1, steps);
        let table = SpaceTimeTable::from_fn(&grid, rho.period(), steps, potential);
        Self::from_samples(diffusivity, &rate, grid, table)
    }

    pub fn from_samples(
        diffusivity: f64,
        rate: &RateSamples,
        grid: Grid1D,
        potential: SpaceTimeTable,
    ) -> Self {
        assert_eq!(potential.steps(), rate.steps());
        assert_eq!(potential.cols(), grid.nodes());
        Self {
            diffusivity,
            grid,
            period: rate.period,
            inv_rho2: rate.inv_rho2.clone(),
            potential,
        }
    }

    pub fn with_potential(&self, potential: SpaceTimeTable) -> Self {
        assert_eq!(potential.steps(), self.steps());
        Self {
            potential,
            ..self.clone()
        }
    }

    pub fn diffusivity(&self) -> f64 {
        self.diffusivity
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn steps(&self) -> usize {
        self.inv_rho2.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.period / self.steps() as f64
    }

    pub fn potential(&self) -> &SpaceTimeTable {
        &self.potential
    }

    /// One step `k → k+1` of a period integrated in direction `dir`.
    pub fn step(&self, u: &Field, k: usize, dir: TimeDirection) -> Result<Field> {
        let mut stepper = Stepper::new(self);
        let mut out = u.clone();
        stepper.step(&mut out, k, dir)?;
        Ok(out)
    }

    /// The period (Poincaré) map: `M` steps covering `[0, T]`.
    pub fn advance_one_period(&self, u: &Field, dir: TimeDirection) -> Result<Field> {
        let mut stepper = Stepper::new(self);
        let mut out = u.clone();
        for k in 0..self.steps() {
            stepper.step(&mut out, k, dir)?;
        }
        Ok(out)
    }

    /// Like [`advance_one_period`](Self::advance_one_period), keeping every slice.
    pub fn advance_recording(&self, u: &Field, dir: TimeDirection) -> Result<PeriodicOrbit> {
        let mut stepper = Stepper::new(self);
        let mut cur = u.clone();
        let mut slices = Vec::with_capacity(self.steps() + 1);
        slices.push(cur.clone());
        for k in 0..self.steps() {
            stepper.step(&mut cur, k, dir)?;
            slices.push(cur.clone());
        }
        let dt = self.dt();
        Ok(PeriodicOrbit {
            times: (0..=self.steps()).map(|m| m as f64 * dt).collect(),
            slices,
        })
    }

    /// Applies the period map to each column of a column-major block.
    pub(crate) fn advance_columns(&self, block: &mut [f64], dir: TimeDirection) -> Result<()> {
        let rows = self.grid.nodes();
        let mut stepper = Stepper::new(self);
        for k in 0..self.steps() {
            stepper.assemble(k, dir)?;
            for col in block.chunks_exact_mut(rows) {
                stepper.apply(col);
            }
        }
        Ok(())
    }
}

/// Crank–Nicolson step with coefficients averaged over the step endpoints.
struct Stepper<'a> {
    spec: &'a LinearEquationSpec,
    sys: Tridiagonal,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    half_q: Vec<f64>,
    lap: Vec<f64>,
    kappa: f64,
}

impl<'a> Stepper<'a> {
    fn new(spec: &'a LinearEquationSpec) -> Self {
        let n = spec.grid.nodes();
        Self {
            spec,
            sys: Tridiagonal::with_capacity(n),
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
            half_q: vec![0.0; n],
            lap: vec![0.0; n],
            kappa: 0.0,
        }
    }

    fn assemble(&mut self, k: usize, dir: TimeDirection) -> Result<()> {
        let spec = self.spec;
        let steps = spec.steps();
        let interval = match dir {
            TimeDirection::Forward => k,
            TimeDirection::Backward => steps - 1 - k,
        };
        let dt = spec.dt();
        let h = spec.grid.spacing();
        let d_bar =
            0.5 * spec.diffusivity * (spec.inv_rho2[interval] + spec.inv_rho2[interval + 1]);
        let kappa = 0.5 * dt * d_bar / (h * h);
        let q0 = spec.potential.row(interval);
        let q1 = spec.potential.row(interval + 1);
        let n = self.diag.len() - 1;
        for j in 0..=n {
            let hq = 0.25 * dt * (q0[j] + q1[j]);
            if !(1.0 - hq > 0.0) {
                return Err(Error::NotDiagonallyDominant { step: k, node: j });
            }
            self.half_q[j] = hq;
            self.diag[j] = 1.0 + 2.0 * kappa - hq;
            self.sub[j] = -kappa;
            self.sup[j] = -kappa;
        }
        self.sup[0] = -2.0 * kappa;
        self.sub[n] = -2.0 * kappa;
        self.kappa = kappa;
        self.sys
            .factor(&self.sub, &self.diag, &self.sup)
            .map_err(|node| Error::NotDiagonallyDominant { step: k, node })
    }

    fn apply(&mut self, u: &mut [f64]) {
        neumann_second_difference(u, &mut self.lap);
        for ((v, lap), hq) in u.iter_mut().zip(&self.lap).zip(&self.half_q) {
            *v += self.kappa * lap + hq * *v;
        }
        self.sys.solve_in_place(u);
    }

    fn step(&mut self, u: &mut Field, k: usize, dir: TimeDirection) -> Result<()> {
        self.assemble(k, dir)?;
        self.apply(u);
        if !u.is_finite() {
            return Err(Error::NonFinite { step: k });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn fixed(d: f64, n: usize, steps: usize, q: impl FnMut(f64, f64) -> f64) -> LinearEquationSpec {
        LinearEquationSpec::new(
            d,
            &EvolutionRate::constant_one(PI / 2.0),
            Grid1D::new(1.0, n),
            steps,
            q,
        )
    }

    fn evolving(d: f64, n: usize, steps: usize) -> LinearEquationSpec {
        let rho = EvolutionRate::exp_cosine(0.3, 4.0);
        LinearEquationSpec::new(d, &rho, Grid1D::new(1.0, n), steps, |y, t| {
            (2.0 * PI * y).cos() - 0.5 * (4.0 * t).sin()
        })
    }

    #[test]
    fn constant_potential_grows_exponentially() {
        let spec = fixed(0.1, 40, 2000, |_, _| 0.7);
        let u = spec
            .advance_one_period(&Field::constant(41, 1.0), TimeDirection::Forward)
            .unwrap();
        let exact = (0.7 * PI / 2.0).exp();
        assert!(u.iter().all(|v| ((v - exact) / exact).abs() < 1e-6));
    }

    #[test]
    fn pure_diffusion_conserves_mass() {
        let spec = fixed(0.3, 50, 500, |_, _| 0.0);
        let grid = *spec.grid();
        let u0 = Field::from_fn(&grid, |y| 1.0 + y * y * (1.5 - y));
        let u1 = spec
            .advance_one_period(&u0, TimeDirection::Forward)
            .unwrap();
        let (m0, m1) = (u0.integral(&grid), u1.integral(&grid));
        assert!((m0 - m1).abs() <= 1e-10 * m0);
        assert!(u1.max() - u1.min() < u0.max() - u0.min());
    }

    #[test]
    fn cosine_mode_decays_at_its_rate() {
        let d = 0.1;
        let spec = fixed(d, 200, 2000, |_, _| 0.0);
        let grid = *spec.grid();
        let u = spec
            .advance_one_period(
                &Field::from_fn(&grid, |y| (PI * y).cos()),
                TimeDirection::Forward,
            )
            .unwrap();
        let decay = (-d * PI * PI * PI / 2.0).exp();
        for (j, y) in grid.points().enumerate() {
            assert!((u[j] - decay * (PI * y).cos()).abs() < 1e-5);
        }
    }

    #[test]
    fn second_order_in_time() {
        let grid = Grid1D::new(1.0, 32);
        let u0 = Field::from_fn(&grid, |y| 1.0 + 0.5 * (PI * y).cos());
        let run = |steps| {
            evolving(0.05, 32, steps)
                .advance_one_period(&u0, TimeDirection::Forward)
                .unwrap()
        };
        let reference = run(800);
        let e1 = run(100).sup_distance(&reference);
        let e2 = run(200).sup_distance(&reference);
        let ratio = e1 / e2;
        assert!((3.5..4.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn period_map_is_linear() {
        let spec = evolving(0.1, 30, 300);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut random = || Field((0..31).map(|_| rng.random_range(-1.0..1.0)).collect());
        let (u, v) = (random(), random());
        let (a, b) = (0.7, -1.3);
        let combo = Field(u.iter().zip(v.iter()).map(|(x, y)| a * x + b * y).collect());
        let lhs = spec
            .advance_one_period(&combo, TimeDirection::Forward)
            .unwrap();
        let mu = spec.advance_one_period(&u, TimeDirection::Forward).unwrap();
        let mv = spec.advance_one_period(&v, TimeDirection::Forward).unwrap();
        let scale = lhs.sup_norm();
        for j in 0..31 {
            assert!((lhs[j] - (a * mu[j] + b * mv[j])).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn backward_map_is_the_weighted_adjoint() {
        let spec = evolving(0.1, 20, 400);
        let grid = *spec.grid();
        let u = Field::from_fn(&grid, |y| 1.0 + y);
        let v = Field::from_fn(&grid, |y| (3.0 * y).cos());
        let pu = spec.advance_one_period(&u, TimeDirection::Forward).unwrap();
        let pv = spec
            .advance_one_period(&v, TimeDirection::Backward)
            .unwrap();
        let dot = |a: &Field, b: &Field| -> f64 {
            (0..grid.nodes())
                .map(|j| grid.weight(j) * a[j] * b[j])
                .sum()
        };
        let (l, r) = (dot(&pu, &v), dot(&u, &pv));
        assert!((l - r).abs() < 1e-12 * l.abs().max(r.abs()));
    }

    #[test]
    fn columns_match_single_fields() {
        let spec = evolving(0.2, 6, 100);
        let n = 7;
        let mut block: Vec<f64> = (0..2 * n).map(|k| (k as f64 * 0.37).sin() + 1.5).collect();
        let first = Field(block[..n].to_vec());
        let second = Field(block[n..].to_vec());
        spec.advance_columns(&mut block, TimeDirection::Backward)
            .unwrap();
        let a = spec
            .advance_one_period(&first, TimeDirection::Backward)
            .unwrap();
        let b = spec
            .advance_one_period(&second, TimeDirection::Backward)
            .unwrap();
        assert!(Field(block[..n].to_vec()).sup_distance(&a) < 1e-14 * a.sup_norm());
        assert!(Field(block[n..].to_vec()).sup_distance(&b) < 1e-14 * b.sup_norm());
    }

    #[test]
    fn large_negative_potential_step_is_rejected() {
        let spec = fixed(0.1, 10, 4, |_, _| 10.0);
        let err = spec
            .step(&Field::constant(11, 1.0), 0, TimeDirection::Forward)
            .unwrap_err();
        assert!(matches!(err, Error::NotDiagonallyDominant { .. }));
    }
}
