use std::ops::{Deref, DerefMut};

/// Uniform grid `y_j = j·L/N`, `j = 0..=N`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    length: f64,
    intervals: usize,
}

impl Grid1D {
    pub fn new(length: f64, intervals: usize) -> Self {
        assert!(intervals >= 1 && length > 0.0);
        Self { length, intervals }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of intervals `N`; there are `N + 1` nodes.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn nodes(&self) -> usize {
        self.intervals + 1
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.intervals as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.length * j as f64 / self.intervals as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.intervals).map(move |j| self.node(j))
    }

    /// Trapezoid weights, the inner product under which the Neumann
    /// Laplacian is self-adjoint.
    pub fn weight(&self, j: usize) -> f64 {
        let h = self.spacing();
        if j == 0 || j == self.intervals {
            0.5 * h
        } else {
            h
        }
    }
}

/// Nodal values of one scalar field at one time instant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Field(pub Vec<f64>);

impl Field {
    pub fn constant(nodes: usize, value: f64) -> Self {
        Field(vec![value; nodes])
    }

    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Field(grid.points().map(f).collect())
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Trapezoid integral over the grid.
    pub fn integral(&self, grid: &Grid1D) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(j, v)| grid.weight(j) * v)
            .sum()
    }

    pub fn l1_norm(&self, grid: &Grid1D) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(j, v)| grid.weight(j) * v.abs())
            .sum()
    }

    pub fn sup_distance(&self, other: &Field) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn scale(&mut self, factor: f64) {
        self.0.iter_mut().for_each(|v| *v *= factor);
    }
}

impl Deref for Field {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// A space-time field on one period, sampled at `t_m = m·T/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit {
    pub times: Vec<f64>,
    pub slices: Vec<Field>,
}

impl PeriodicOrbit {
    /// `sup |u(·,0) − u(·,T)| / sup |u(·,0)|`.
    pub fn closure_defect(&self) -> f64 {
        let first = &self.slices[0];
        let last = self.slices.last().expect("orbit has slices");
        first.sup_distance(last) / first.sup_norm().max(f64::MIN_POSITIVE)
    }

    pub fn sup_norm(&self) -> f64 {
        self.slices.iter().fold(0.0, |m, s| m.max(s.sup_norm()))
    }

    pub fn min(&self) -> f64 {
        self.slices
            .iter()
            .fold(f64::INFINITY, |m, s| m.min(s.min()))
    }
}
