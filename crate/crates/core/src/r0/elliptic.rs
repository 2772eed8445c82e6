use crate::model::{CoefficientProfile, Grid1D};

/// Symmetric tridiagonal matrix: `diag[0..n]`, `off[0..n-1]`.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    /// Ghost-node Neumann discretization of `−d·u'' + c(y)·u`, symmetrized by
    /// the square root of the trapezoid weights.
    pub fn neumann(c: &[f64], diffusivity: f64, grid: &Grid1D) -> Self {
        let n = grid.intervals();
        let h = grid.spacing();
        let k = diffusivity / (h * h);
        let diag = c.iter().map(|cj| 2.0 * k + cj).collect();
        let off = (0..n)
            .map(|j| {
                let row: f64 = if j == 0 { 2.0 } else { 1.0 };
                let col = if j + 1 == n { 2.0 } else { 1.0 };
                -k * (row * col).sqrt()
            })
            .collect();
        Self { diag, off }
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut pivot = 1.0;
        for (j, &a) in self.diag.iter().enumerate() {
            let coupling = if j == 0 {
                0.0
            } else {
                self.off[j - 1] * self.off[j - 1] / pivot
            };
            pivot = a - x - coupling;
            if pivot == 0.0 {
                pivot = -f64::EPSILON * (a.abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..n {
            let left = if j > 0 { self.off[j - 1].abs() } else { 0.0 };
            let right = if j + 1 < n { self.off[j].abs() } else { 0.0 };
            lo = lo.min(self.diag[j] - left - right);
            hi = hi.max(self.diag[j] + left + right);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) by Sturm bisection.
    pub fn eigenvalue(&self, k: usize, tol: f64) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        lo -= tol;
        hi += tol;
        while hi - lo > tol.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Smallest eigenvalue of `−d·u'' + c(y)·u` with Neumann ends, on the grid.
///
/// `c` is evaluated as a profile in `y`.
pub fn neumann_elliptic_principal_eigenvalue(
    c: &CoefficientProfile,
    diffusivity: f64,
    grid: &Grid1D,
) -> f64 {
    let values: Vec<f64> = grid.points().map(|y| c.profile(y)).collect();
    SymTridiagonal::neumann(&values, diffusivity, grid).eigenvalue(0, 1e-10)
}
