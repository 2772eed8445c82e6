use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{Field, Grid1D};
use crate::pde::{LinearEquationSpec, TimeDirection};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// Convergence threshold on successive Rayleigh ratios, relative to the ratio.
    pub tol: f64,
    pub max_sweeps: usize,
    /// On a stalled power iteration, assemble the period-map matrix and
    /// square it instead of failing.
    pub assembled_fallback: bool,
    /// Largest node count for which the assembled fallback is attempted.
    pub assembled_max_nodes: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_sweeps: 200,
            assembled_fallback: true,
            assembled_max_nodes: 1025,
        }
    }
}

impl SpectralOptions {
    pub fn power_only() -> Self {
        Self {
            assembled_fallback: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMethod {
    Power,
    Assembled,
}

#[derive(Debug, Clone)]
pub struct SpectralRadius {
    pub value: f64,
    /// Principal eigenvector of the period map, sup-normalized to 1.
    pub eigenvector: Field,
    pub sweeps: usize,
    pub method: SpectralMethod,
}

fn weighted_dot(grid: &Grid1D, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(j, (x, y))| grid.weight(j) * x * y)
        .sum()
}

fn normalize_sup(v: &mut Field) -> f64 {
    // Sign fixed so the largest-magnitude entry is positive.
    let (mut big, mut signed) = (0.0f64, 0.0f64);
    for &x in v.iter() {
        if x.abs() > big {
            big = x.abs();
            signed = x;
        }
    }
    if big > 0.0 {
        v.scale(1.0 / signed);
    }
    big
}

/// Spectral radius of the period map, by power iteration from the
/// constant-1 field.
pub fn period_map_spectral_radius(spec: &LinearEquationSpec, dir: TimeDirection) -> Result<f64> {
    spectral_radius_with(spec, dir, None, &SpectralOptions::default()).map(|r| r.value)
}

/// Power iteration with an optional start vector and options.
pub fn spectral_radius_with(
    spec: &LinearEquationSpec,
    dir: TimeDirection,
    start: Option<&Field>,
    options: &SpectralOptions,
) -> Result<SpectralRadius> {
    let grid = *spec.grid();
    let mut v = match start {
        Some(s) if s.len() == grid.nodes() && s.sup_norm() > 0.0 => s.clone(),
        _ => Field::constant(grid.nodes(), 1.0),
    };
    normalize_sup(&mut v);
    let mut prev = f64::NAN;
    let mut defect = f64::INFINITY;
    for sweep in 1..=options.max_sweeps {
        let mut w = spec.advance_one_period(&v, dir)?;
        let ratio = weighted_dot(&grid, &w, &v) / weighted_dot(&grid, &v, &v);
        if normalize_sup(&mut w) == 0.0 {
            return Ok(SpectralRadius {
                value: 0.0,
                eigenvector: v,
                sweeps: sweep,
                method: SpectralMethod::Power,
            });
        }
        defect = (ratio - prev).abs();
        v = w;
        if defect <= options.tol * ratio.abs() {
            return Ok(SpectralRadius {
                value: ratio,
                eigenvector: v,
                sweeps: sweep,
                method: SpectralMethod::Power,
            });
        }
        prev = ratio;
    }
    if options.assembled_fallback && grid.nodes() <= options.assembled_max_nodes {
        let mut r = assembled_spectral_radius(spec, dir)?;
        r.sweeps += options.max_sweeps;
        return Ok(r);
    }
    Err(Error::NoConvergence {
        what: "period-map power iteration",
        iterations: options.max_sweeps,
        defect,
    })
}

/// Dense period-map matrix: column `j` is the map applied to the `j`-th unit vector.
pub fn assemble_period_map(spec: &LinearEquationSpec, dir: TimeDirection) -> Result<DMatrix<f64>> {
    let n = spec.grid().nodes();
    let mut block = vec![0.0; n * n];
    for j in 0..n {
        block[j * n + j] = 1.0;
    }
    spec.advance_columns(&mut block, dir)?;
    Ok(DMatrix::from_vec(n, n, block))
}

/// Dominant eigenpair of the assembled period map by repeated squaring.
pub fn assembled_spectral_radius(
    spec: &LinearEquationSpec,
    dir: TimeDirection,
) -> Result<SpectralRadius> {
    let grid = *spec.grid();
    let map = assemble_period_map(spec, dir)?;
    let (value, vec, squarings) = dominant_by_squaring(&map, &grid)?;
    Ok(SpectralRadius {
        value,
        eigenvector: vec,
        sweeps: squarings,
        method: SpectralMethod::Assembled,
    })
}

fn dominant_by_squaring(map: &DMatrix<f64>, grid: &Grid1D) -> Result<(f64, Field, usize)> {
    let scale = map.amax();
    if scale == 0.0 {
        return Ok((0.0, Field::constant(map.nrows(), 1.0), 0));
    }
    let mut power = map / scale;
    let mut squarings = 0;
    let mut vec = Field::constant(map.nrows(), 1.0);
    let mut last_change = f64::INFINITY;
    for k in 1..=80 {
        let next = &power * &power;
        let big = next.amax();
        if big == 0.0 || !big.is_finite() {
            break;
        }
        let next = next / big;
        // Column sums of a near rank-one positive power give the eigenvector.
        let mut candidate = Field(next.column_sum().iter().copied().collect());
        if candidate.sup_norm() == 0.0 {
            candidate = Field(next.column(0).iter().copied().collect());
        }
        normalize_sup(&mut candidate);
        last_change = candidate.sup_distance(&vec);
        vec = candidate;
        power = next;
        squarings = k;
        if last_change < 1e-14 {
            break;
        }
    }
    // Polish with a few power steps on the dense map and take the Rayleigh ratio.
    let mut value = 0.0;
    for _ in 0..4 {
        let w = map * nalgebra::DVector::from_column_slice(&vec);
        let w = Field(w.iter().copied().collect());
        value = weighted_dot(grid, &w, &vec) / weighted_dot(grid, &vec, &vec);
        let mut w = w;
        normalize_sup(&mut w);
        vec = w;
    }
    if !value.is_finite() || last_change > 1e-6 {
        return Err(Error::NoConvergence {
            what: "assembled period-map squaring",
            iterations: squarings,
            defect: last_change,
        });
    }
    Ok((value, vec, squarings))
}

/// Principal Floquet exponent `λ = −ln(r)/T` of `u_t = d/ρ²·u_yy + q·u`.
///
/// A periodic solution of `u_t = d/ρ²·u_yy + q·u + λ·u` exists exactly for this λ.
pub fn principal_periodic_eigenvalue_general(spec: &LinearEquationSpec) -> Result<f64> {
    let r = period_map_spectral_radius(spec, TimeDirection::Forward)?;
    Ok(-r.ln() / spec.period())
}
