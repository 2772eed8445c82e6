/// Thomas-algorithm factorization of a tridiagonal matrix.
///
/// `sub[0]` and `sup[n-1]` are unused.
#[derive(Debug, Clone, Default)]
pub(crate) struct Tridiagonal {
    sub: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper: Vec<f64>,
}

impl Tridiagonal {
    pub(crate) fn with_capacity(n: usize) -> Self {
        Self {
            sub: Vec::with_capacity(n),
            inv_pivot: Vec::with_capacity(n),
            upper: Vec::with_capacity(n),
        }
    }

    /// Factors in place; returns the first row with a vanishing pivot.
    pub(crate) fn factor(&mut self, sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<(), usize> {
        let n = diag.len();
        self.sub.clear();
        self.sub.extend_from_slice(sub);
        self.inv_pivot.clear();
        self.upper.clear();
        let mut prev_upper = 0.0;
        for j in 0..n {
            let pivot = diag[j] - if j > 0 { sub[j] * prev_upper } else { 0.0 };
            if !(pivot.abs() > 1e-300) || !pivot.is_finite() {
                return Err(j);
            }
            let inv = 1.0 / pivot;
            prev_upper = if j + 1 < n { sup[j] * inv } else { 0.0 };
            self.inv_pivot.push(inv);
            self.upper.push(prev_upper);
        }
        Ok(())
    }

    pub(crate) fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        rhs[0] *= self.inv_pivot[0];
        for j in 1..n {
            rhs[j] = (rhs[j] - self.sub[j] * rhs[j - 1]) * self.inv_pivot[j];
        }
        for j in (0..n - 1).rev() {
            rhs[j] -= self.upper[j] * rhs[j + 1];
        }
    }
}

/// `(A u)_j` for the ghost-node Neumann Laplacian, scaled by `h²`.
#[inline]
pub(crate) fn neumann_second_difference(u: &[f64], out: &mut [f64]) {
    let n = u.len() - 1;
    out[0] = 2.0 * (u[1] - u[0]);
    for j in 1..n {
        out[j] = u[j - 1] - 2.0 * u[j] + u[j + 1];
    }
    out[n] = 2.0 * (u[n - 1] - u[n]);
}
