use super::tridiag::{neumann_second_difference, Tridiagonal};
use crate::error::{Error, Result};
use crate::model::{CoefficientTables, Field, ModelConfig, PeriodicOrbit};

/// Below this value of `S + I` the incidence `β·S·I/(S+I)` is taken as 0.
pub const DENOMINATOR_GUARD: f64 = 1e-12;

/// IMEX stepper for the transformed SIS system: Crank–Nicolson diffusion and
/// an explicit trapezoidal (Heun) reaction.
pub struct SisStepper<'a> {
    tables: &'a CoefficientTables,
    d_s: f64,
    d_i: f64,
    dt: f64,
    sys_s: Tridiagonal,
    sys_i: Tridiagonal,
    buf: Buffers,
    clamps: usize,
}

#[derive(Default)]
struct Buffers {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    lap: Vec<f64>,
    expl_s: Vec<f64>,
    expl_i: Vec<f64>,
    r0_s: Vec<f64>,
    r0_i: Vec<f64>,
    r1_s: Vec<f64>,
    r1_i: Vec<f64>,
    pred_s: Vec<f64>,
    pred_i: Vec<f64>,
}

impl<'a> SisStepper<'a> {
    pub fn new(config: &ModelConfig, tables: &'a CoefficientTables) -> Self {
        let n = tables.grid.nodes();
        let z = || vec![0.0; n];
        Self {
            tables,
            d_s: config.d_s,
            d_i: config.d_i,
            dt: tables.rate.period / tables.rate.steps() as f64,
            sys_s: Tridiagonal::with_capacity(n),
            sys_i: Tridiagonal::with_capacity(n),
            buf: Buffers {
                sub: z(),
                diag: z(),
                sup: z(),
                lap: z(),
                expl_s: z(),
                expl_i: z(),
                r0_s: z(),
                r0_i: z(),
                r1_s: z(),
                r1_i: z(),
                pred_s: z(),
                pred_i: z(),
            },
            clamps: 0,
        }
    }

    /// Negative undershoots clamped to zero so far.
    pub fn clamp_count(&self) -> usize {
        self.clamps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn reaction(&self, m: usize, s: &[f64], i: &[f64], out_s: &mut [f64], out_i: &mut [f64]) {
        let t = self.tables;
        let (a, b) = (t.a.row(m), t.b.row(m));
        let (beta, gamma) = (t.beta.row(m), t.gamma.row(m));
        let dil = t.rate.dilution[m];
        for j in 0..s.len() {
            let (sj, ij) = (s[j], i[j]);
            let total = sj + ij;
            let incidence = if total < DENOMINATOR_GUARD {
                0.0
            } else {
                beta[j] * sj * ij / total
            };
            out_s[j] = a[j] * sj - b[j] * sj * sj - incidence + gamma[j] * ij - dil * sj;
            out_i[j] = incidence - gamma[j] * ij - dil * ij;
        }
    }

    fn factor(sys: &mut Tridiagonal, buf: &mut Buffers, kappa: f64, step: usize) -> Result<()> {
        let n = buf.diag.len() - 1;
        buf.diag.iter_mut().for_each(|d| *d = 1.0 + 2.0 * kappa);
        buf.sub.iter_mut().for_each(|d| *d = -kappa);
        buf.sup.iter_mut().for_each(|d| *d = -kappa);
        buf.sup[0] = -2.0 * kappa;
        buf.sub[n] = -2.0 * kappa;
        sys.factor(&buf.sub, &buf.diag, &buf.sup)
            .map_err(|node| Error::NotDiagonallyDominant { step, node })
    }

    fn clamp(values: &mut [f64], clamps: &mut usize) {
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
                *clamps += 1;
            }
        }
    }

    /// Advances `(S, I)` over the step from time node `m` to `m + 1`
    /// (indices taken modulo the period).
    pub fn step(&mut self, s: &mut Field, i: &mut Field, m: usize) -> Result<()> {
        let steps = self.tables.rate.steps();
        let m = m % steps;
        let h = self.tables.grid.spacing();
        let inv = &self.tables.rate.inv_rho2;
        let d_bar = 0.5 * (inv[m] + inv[m + 1]);
        let kappa_s = 0.5 * self.dt * self.d_s * d_bar / (h * h);
        let kappa_i = 0.5 * self.dt * self.d_i * d_bar / (h * h);
        let dt = self.dt;

        let mut buf = std::mem::take(&mut self.buf);
        Self::factor(&mut self.sys_s, &mut buf, kappa_s, m)?;
        Self::factor(&mut self.sys_i, &mut buf, kappa_i, m)?;

        neumann_second_difference(s, &mut buf.lap);
        for j in 0..s.len() {
            buf.expl_s[j] = s[j] + kappa_s * buf.lap[j];
        }
        neumann_second_difference(i, &mut buf.lap);
        for j in 0..i.len() {
            buf.expl_i[j] = i[j] + kappa_i * buf.lap[j];
        }
        self.reaction(m, s, i, &mut buf.r0_s, &mut buf.r0_i);

        for j in 0..s.len() {
            buf.pred_s[j] = buf.expl_s[j] + dt * buf.r0_s[j];
            buf.pred_i[j] = buf.expl_i[j] + dt * buf.r0_i[j];
        }
        self.sys_s.solve_in_place(&mut buf.pred_s);
        self.sys_i.solve_in_place(&mut buf.pred_i);
        Self::clamp(&mut buf.pred_s, &mut self.clamps);
        Self::clamp(&mut buf.pred_i, &mut self.clamps);

        self.reaction(
            m + 1,
            &buf.pred_s,
            &buf.pred_i,
            &mut buf.r1_s,
            &mut buf.r1_i,
        );
        for j in 0..s.len() {
            s[j] = buf.expl_s[j] + 0.5 * dt * (buf.r0_s[j] + buf.r1_s[j]);
            i[j] = buf.expl_i[j] + 0.5 * dt * (buf.r0_i[j] + buf.r1_i[j]);
        }
        self.buf = buf;
        self.sys_s.solve_in_place(s);
        self.sys_i.solve_in_place(i);
        Self::clamp(s, &mut self.clamps);
        Self::clamp(i, &mut self.clamps);
        if !s.is_finite() || !i.is_finite() {
            return Err(Error::NonFinite { step: m });
        }
        Ok(())
    }
}

/// One IMEX step of the full system from time node `m`.
pub fn step_coupled_sis(
    s: &Field,
    i: &Field,
    config: &ModelConfig,
    tables: &CoefficientTables,
    m: usize,
) -> Result<(Field, Field)> {
    let mut stepper = SisStepper::new(config, tables);
    let (mut s, mut i) = (s.clone(), i.clone());
    stepper.step(&mut s, &mut i, m)?;
    Ok((s, i))
}

/// Per-period record of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSummary {
    pub period: usize,
    pub sup_i: f64,
    pub l1_i: f64,
    /// `sup |S(·, mT) − S(·, (m−1)T)|`.
    pub s_closure_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub s: Field,
    pub i: Field,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub periods: usize,
    /// Store a snapshot every this many steps; 0 stores none.
    pub snapshot_every: usize,
    /// Periods at the end over which the running minimum of `sup I` is taken.
    pub late_window: usize,
    /// Tolerance on the S closure defect for declaring a periodic orbit.
    pub closure_tol: f64,
}

impl SimulationOptions {
    pub fn periods(periods: usize) -> Self {
        Self {
            periods,
            snapshot_every: 0,
            late_window: 5,
            closure_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub periods: Vec<PeriodSummary>,
    pub snapshots: Vec<Snapshot>,
    /// `S` over the last simulated period.
    pub final_s: PeriodicOrbit,
    pub final_i: Field,
    /// Minimum over the late window of `sup_y I`, sampled every step.
    pub late_min_sup_i: f64,
    pub s_converged: bool,
    pub clamps: usize,
}

impl Trajectory {
    pub fn final_sup_i(&self) -> f64 {
        self.final_i.sup_norm()
    }
}

/// Runs `periods·M` steps from the configured initial data.
pub fn simulate(config: &ModelConfig, options: SimulationOptions) -> Result<Trajectory> {
    let tables = CoefficientTables::new(config);
    simulate_with(config, &tables, options)
}

pub fn simulate_with(
    config: &ModelConfig,
    tables: &CoefficientTables,
    options: SimulationOptions,
) -> Result<Trajectory> {
    let grid = tables.grid;
    let steps = tables.rate.steps();
    let mut stepper = SisStepper::new(config, tables);
    let dt = stepper.dt();
    let mut s = config.initial_s.sample(&grid);
    let mut i = config.initial_i.sample(&grid);

    let mut summaries = Vec::with_capacity(options.periods);
    let mut snapshots = Vec::new();
    let mut last_period_s = Vec::with_capacity(steps + 1);
    let late_start = options.periods.saturating_sub(options.late_window.max(1));
    let mut late_min = f64::INFINITY;
    let mut s_prev = s.clone();
    let mut global_step = 0usize;
    if options.snapshot_every > 0 {
        snapshots.push(Snapshot {
            t: 0.0,
            s: s.clone(),
            i: i.clone(),
        });
    }
    for p in 0..options.periods {
        let last = p + 1 == options.periods;
        if last {
            last_period_s.push(s.clone());
        }
        for m in 0..steps {
            stepper.step(&mut s, &mut i, m).map_err(|e| match e {
                Error::NonFinite { .. } => Error::NonFinite { step: global_step },
                other => other,
            })?;
            global_step += 1;
            if p >= late_start {
                late_min = late_min.min(i.sup_norm());
            }
            if last {
                last_period_s.push(s.clone());
            }
            if options.snapshot_every > 0 && global_step.is_multiple_of(options.snapshot_every) {
                snapshots.push(Snapshot {
                    t: global_step as f64 * dt,
                    s: s.clone(),
                    i: i.clone(),
                });
            }
        }
        summaries.push(PeriodSummary {
            period: p + 1,
            sup_i: i.sup_norm(),
            l1_i: i.l1_norm(&grid),
            s_closure_defect: s.sup_distance(&s_prev),
        });
        s_prev.clone_from(&s);
    }
    if options.periods == 0 {
        last_period_s.push(s.clone());
    }
    let s_converged = summaries
        .last()
        .is_some_and(|r| r.s_closure_defect <= options.closure_tol * s.sup_norm().max(1e-300));
    let final_s = PeriodicOrbit {
        times: (0..last_period_s.len()).map(|m| m as f64 * dt).collect(),
        slices: last_period_s,
    };
    Ok(Trajectory {
        periods: summaries,
        snapshots,
        final_s,
        final_i: i,
        late_min_sup_i: if late_min.is_finite() { late_min } else { 0.0 },
        s_converged,
        clamps: stepper.clamp_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EvolutionRate, InitialData};
    use crate::presets::{preset, LambdaStarConvention, Preset};

    fn example1(fixed: bool) -> ModelConfig {
        let p = if fixed {
            Preset::Example1Fixed
        } else {
            Preset::Example1Evolving
        };
        preset(p, LambdaStarConvention::PaperExample)
    }

    #[test]
    fn zero_infection_is_invariant() {
        let mut c = example1(false);
        c.grid_points = 40;
        c.initial_i = InitialData::zero();
        let traj = simulate(&c, SimulationOptions::periods(3)).unwrap();
        assert_eq!(traj.final_sup_i(), 0.0);
        assert!(traj.periods.iter().all(|p| p.sup_i == 0.0 && p.l1_i == 0.0));
    }

    #[test]
    fn logistic_step_matches_ode_solution() {
        let mut c = example1(true);
        c.grid_points = 10;
        let tables = CoefficientTables::new(&c);
        let s0 = 0.3;
        let (s, i) = step_coupled_sis(
            &Field::constant(11, s0),
            &Field::constant(11, 0.0),
            &c,
            &tables,
            0,
        )
        .unwrap();
        let dt = c.dt();
        // Ṡ = S(1 − 10S): S(t) = S0·e^t / (1 + 10·S0·(e^t − 1)).
        let exact = s0 * dt.exp() / (1.0 + 10.0 * s0 * (dt.exp() - 1.0));
        assert!(i.sup_norm() == 0.0);
        assert!(s.iter().all(|v| (v - exact).abs() < 1e-9));
        assert!(s[0] < s0 && s[0] > 0.1);
    }

    #[test]
    fn first_step_of_example_is_positive_and_close_to_fine_reference() {
        let c = example1(false);
        let tables = CoefficientTables::new(&c);
        let grid = tables.grid;
        let (s0, i0) = (c.initial_s.sample(&grid), c.initial_i.sample(&grid));
        let (s, i) = step_coupled_sis(&s0, &i0, &c, &tables, 0).unwrap();
        assert!(s.min() > 0.0 && i.min() > 0.0 && s.is_finite() && i.is_finite());

        let mut fine = c.clone();
        fine.steps_per_period *= 8;
        let fine_tables = CoefficientTables::new(&fine);
        let mut stepper = SisStepper::new(&fine, &fine_tables);
        let (mut fs, mut fi) = (s0, i0);
        for m in 0..8 {
            stepper.step(&mut fs, &mut fi, m).unwrap();
        }
        assert!(s.sup_distance(&fs) < 1e-7 && i.sup_distance(&fi) < 1e-7);
    }

    #[test]
    fn denominator_guard_zeroes_incidence() {
        let mut c = example1(true);
        c.grid_points = 4;
        let tables = CoefficientTables::new(&c);
        let (s, i) = step_coupled_sis(
            &Field::constant(5, 0.0),
            &Field::constant(5, 1e-14),
            &c,
            &tables,
            0,
        )
        .unwrap();
        assert!(s.is_finite() && i.is_finite());
        assert!(i.max() < 1e-14);
    }

    #[test]
    fn simulation_records_every_period_and_snapshots() {
        let mut c = example1(false);
        c.grid_points = 20;
        c.steps_per_period = 100;
        let opts = SimulationOptions {
            snapshot_every: 50,
            ..SimulationOptions::periods(4)
        };
        let traj = simulate(&c, opts).unwrap();
        assert_eq!(traj.periods.len(), 4);
        assert_eq!(traj.snapshots.len(), 1 + 4 * 100 / 50);
        assert_eq!(traj.final_s.slices.len(), 101);
        assert_eq!(traj.clamps, 0);
        let rho = EvolutionRate::exp_cosine(0.3, 4.0);
        assert!((traj.snapshots.last().unwrap().t - 4.0 * rho.period()).abs() < 1e-12);
    }
}
