use super::coefficient::CoefficientProfile;
use super::config::ModelConfig;
use super::grid::Grid1D;
use super::rate::EvolutionRate;

/// Row-major samples `u(y_j, t_m)` for `m = 0..=M`, `j = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeTable {
    cols: usize,
    data: Vec<f64>,
}

impl SpaceTimeTable {
    pub fn from_fn(
        grid: &Grid1D,
        period: f64,
        steps: usize,
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> Self {
        let cols = grid.nodes();
        let mut data = Vec::with_capacity(cols * (steps + 1));
        for m in 0..=steps {
            let t = period * m as f64 / steps as f64;
            data.extend(grid.points().map(|y| f(y, t)));
        }
        Self { cols, data }
    }

    pub fn constant(grid: &Grid1D, steps: usize, value: f64) -> Self {
        Self {
            cols: grid.nodes(),
            data: vec![value; grid.nodes() * (steps + 1)],
        }
    }

    pub fn profile(profile: &CoefficientProfile, rho: &RateSamples, grid: &Grid1D) -> Self {
        let cols = grid.nodes();
        let mut data = Vec::with_capacity(cols * rho.values.len());
        for (m, &r) in rho.values.iter().enumerate() {
            let t = rho.times[m];
            data.extend(
                grid.points()
                    .map(|y| profile.evaluate_with(r, rho.period, y, t)),
            );
        }
        Self { cols, data }
    }

    pub fn steps(&self) -> usize {
        self.data.len() / self.cols - 1
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.data[m * self.cols..(m + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    /// `self·scale + offset·other`, elementwise.
    pub fn combine(&self, scale: f64, other: &SpaceTimeTable, offset: f64) -> Self {
        debug_assert_eq!(self.data.len(), other.data.len());
        Self {
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| scale * a + offset * b)
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            cols: self.cols,
            data: self.data.iter().map(|v| f(*v)).collect(),
        }
    }

    /// Adds a function of the time index to every entry of each row.
    pub fn add_rowwise(&mut self, per_row: &[f64]) {
        for (row, &v) in self.data.chunks_exact_mut(self.cols).zip(per_row) {
            row.iter_mut().for_each(|x| *x += v);
        }
    }
}

/// ρ, `n·ρ̇/ρ` and `1/ρ²` on the time nodes `t_m = m·T/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSamples {
    pub period: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub dilution: Vec<f64>,
    pub inv_rho2: Vec<f64>,
}

impl RateSamples {
    pub fn new(rho: &EvolutionRate, n: u32, steps: usize) -> Self {
        let period = rho.period();
        let times: Vec<f64> = (0..=steps)
            .map(|m| period * m as f64 / steps as f64)
            .collect();
        let mut values = Vec::with_capacity(steps + 1);
        let mut dilution = Vec::with_capacity(steps + 1);
        let mut inv_rho2 = Vec::with_capacity(steps + 1);
        for &t in &times {
            let (r, dr) = rho.value_and_derivative(t);
            values.push(r);
            dilution.push(n as f64 * dr / r);
            inv_rho2.push(1.0 / (r * r));
        }
        Self {
            period,
            times,
            values,
            dilution,
            inv_rho2,
        }
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }
}

/// All model coefficients sampled on the space-time grid of one period.
#[derive(Debug, Clone)]
pub struct CoefficientTables {
    pub grid: Grid1D,
    pub rate: RateSamples,
    pub a: SpaceTimeTable,
    pub b: SpaceTimeTable,
    pub beta: SpaceTimeTable,
    pub gamma: SpaceTimeTable,
}

impl CoefficientTables {
    pub fn new(config: &ModelConfig) -> Self {
        let grid = config.grid();
        let rate = RateSamples::new(&config.rho, config.n, config.steps_per_period);
        Self {
            a: SpaceTimeTable::profile(&config.a, &rate, &grid),
            b: SpaceTimeTable::profile(&config.b, &rate, &grid),
            beta: SpaceTimeTable::profile(&config.beta, &rate, &grid),
            gamma: SpaceTimeTable::profile(&config.gamma, &rate, &grid),
            grid,
            rate,
        }
    }

    /// Only β and γ; enough for the infected-class eigenproblems.
    pub fn infection(
        config: &ModelConfig,
    ) -> (Grid1D, RateSamples, SpaceTimeTable, SpaceTimeTable) {
        let grid = config.grid();
        let rate = RateSamples::new(&config.rho, config.n, config.steps_per_period);
        let beta = SpaceTimeTable::profile(&config.beta, &rate, &grid);
        let gamma = SpaceTimeTable::profile(&config.gamma, &rate, &grid);
        (grid, rate, beta, gamma)
    }
}
