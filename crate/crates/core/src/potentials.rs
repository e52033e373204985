//! Nyström discretisations of the Laplace layer potentials with kernel
//! `G(x) = (1/2π) ln|x|` on θ-parametrised closed curves.
//!
//! Conventions: `∂_ν S[ψ]|± = (±½ + K*)ψ`, `D[φ]|± = (∓½ + K)φ`, and
//! `∂_ν D[φ] = d/ds S[dφ/ds]`.

use std::f64::consts::PI;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, QuadratureGrid};
use crate::spectral;

/// Densities whose Fourier tail above `3N/8` exceeds this fraction of the peak
/// are treated as unresolved by the hypersingular operator.
pub const HYPERSINGULAR_TAIL_TOL: f64 = 1e-8;

/// Condition numbers above this are reported as near-singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Values of a scalar function at the grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDensity {
    pub values: Vec<f64>,
}

impl BoundaryDensity {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: &QuadratureGrid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: grid.theta.iter().map(|&t| f(t)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    /// `|∮ v ds| / (|∂Ω|·max|v|)`; zero for a zero density.
    pub fn relative_mean(&self, grid: &QuadratureGrid) -> f64 {
        relative_mean(grid, &self.values)
    }

    pub fn is_mean_zero(&self, grid: &QuadratureGrid) -> bool {
        self.relative_mean(grid) < 1e-10
    }
}

impl Deref for BoundaryDensity {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn relative_mean(grid: &QuadratureGrid, v: &[f64]) -> f64 {
    let scale = max_abs(v);
    if scale == 0.0 {
        return 0.0;
    }
    grid.integrate(v).abs() / (grid.perimeter() * scale)
}

/// Removes the arc-length mean.
pub(crate) fn project_mean_zero(grid: &QuadratureGrid, v: &mut [f64]) {
    let mean = grid.integrate(v) / grid.perimeter();
    v.iter_mut().for_each(|x| *x -= mean);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    SingleLayer,
    KStar,
    DoubleLayerTrace,
    Hypersingular,
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub entries: DMatrix<f64>,
}

impl OperatorMatrix {
    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.nrows() == 0
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.entries * DVector::from_column_slice(x);
        v.as_slice().to_vec()
    }
}

fn assemble(
    grid: &QuadratureGrid,
    kind: OperatorKind,
    entry: impl Fn(usize, usize, f64) -> f64 + Sync,
) -> Result<OperatorMatrix> {
    let n = grid.len();
    let scale = grid.max_spacing().max(f64::MIN_POSITIVE);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return Ok(entry(i, j, 0.0));
                    }
                    let d2 = (grid.points[i] - grid.points[j]).norm_squared();
                    if d2.sqrt() < 1e-12 * scale {
                        return Err(Error::SingularGrid { i, j });
                    }
                    Ok(entry(i, j, d2))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(OperatorMatrix {
        kind,
        entries: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
    })
}

/// Quadrature weights for `∫ ln(4 sin²((t−τ)/2)) g(τ) dτ` at `t − τ = 2πk/N`.
fn log_weights(n_nodes: usize) -> Vec<f64> {
    let n = n_nodes / 2;
    let nf = n as f64;
    (0..n_nodes)
        .map(|k| {
            let tau = 2.0 * PI * k as f64 / n_nodes as f64;
            let series: f64 = (1..n).map(|m| (m as f64 * tau).cos() / m as f64).sum();
            -2.0 * PI / nf * series - PI / (nf * nf) * (nf * tau).cos()
        })
        .collect()
}

/// Single-layer operator with the logarithmic singularity split off and
/// integrated exactly against trigonometric interpolants.
pub fn single_layer_matrix(grid: &QuadratureGrid) -> Result<OperatorMatrix> {
    let n = grid.len();
    let r = log_weights(n);
    let dt = 2.0 * PI / n as f64;
    assemble(grid, OperatorKind::SingleLayer, |i, j, d2| {
        let smooth = if i == j {
            grid.jacobian[i].ln()
        } else {
            let s = ((grid.theta[i] - grid.theta[j]) / 2.0).sin();
            0.5 * d2.ln() - 0.5 * (4.0 * s * s).ln()
        };
        (0.5 * r[(i + n - j) % n] + dt * smooth) * grid.jacobian[j] / (2.0 * PI)
    })
}

/// Adjoint double-layer (Neumann–Poincaré) operator.
pub fn kstar_matrix(grid: &QuadratureGrid) -> Result<OperatorMatrix> {
    let n = grid.len() as f64;
    assemble(grid, OperatorKind::KStar, |i, j, d2| {
        if i == j {
            grid.curvature[i] * grid.jacobian[i] / (2.0 * n)
        } else {
            (grid.points[i] - grid.points[j]).dot(&grid.normals[i]) / d2 * grid.jacobian[j] / n
        }
    })
}

/// Boundary trace operator `K` of the double layer.
pub fn double_layer_matrix(grid: &QuadratureGrid) -> Result<OperatorMatrix> {
    let n = grid.len() as f64;
    assemble(grid, OperatorKind::DoubleLayerTrace, |i, j, d2| {
        if i == j {
            grid.curvature[j] * grid.jacobian[j] / (2.0 * n)
        } else {
            (grid.points[j] - grid.points[i]).dot(&grid.normals[j]) / d2 * grid.jacobian[j] / n
        }
    })
}

/// Arc-length derivative of nodal values.
pub fn arc_derivative(grid: &QuadratureGrid, v: &[f64]) -> Vec<f64> {
    spectral::derivative(v)
        .into_iter()
        .zip(&grid.jacobian)
        .map(|(d, h)| d / h)
        .collect()
}

const HYPERSINGULAR_SIGN: f64 = 1.0;

/// `∂_ν D[φ]` on the boundary, given the assembled single-layer matrix.
pub fn hypersingular_apply_with(
    grid: &QuadratureGrid,
    single_layer: &OperatorMatrix,
    phi: &[f64],
) -> Result<Vec<f64>> {
    let n = grid.len();
    let tail_ratio = spectral::tail_ratio(phi, 3 * n / 8);
    if tail_ratio > HYPERSINGULAR_TAIL_TOL {
        return Err(Error::ResolutionLoss { tail_ratio });
    }
    let inner = single_layer.apply(&arc_derivative(grid, phi));
    Ok(arc_derivative(grid, &inner)
        .into_iter()
        .map(|v| HYPERSINGULAR_SIGN * v)
        .collect())
}

/// `∂_ν D[φ]` on the boundary.
pub fn hypersingular_apply(grid: &QuadratureGrid, phi: &[f64]) -> Result<Vec<f64>> {
    hypersingular_apply_with(grid, &single_layer_matrix(grid)?, phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircleOperator {
    SingleLayer,
    KStar,
    DoubleLayer,
    Hypersingular,
}

/// Exact action of a layer operator on `cos(nθ)` over the circle of radius `r0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSpectral {
    pub op: CircleOperator,
    pub n: u32,
    pub r0: f64,
}

pub fn circle_spectral(op: CircleOperator, n: u32, r0: f64) -> CircleSpectral {
    CircleSpectral { op, n, r0 }
}

impl CircleSpectral {
    /// Multiplier of `cos(nθ)` in the on-boundary action (for the double layer,
    /// the trace operator `K`).
    pub fn boundary(&self) -> f64 {
        let (n, r0) = (self.n as f64, self.r0);
        match (self.op, self.n) {
            (CircleOperator::SingleLayer, 0) => r0 * r0.ln(),
            (CircleOperator::SingleLayer, _) => -r0 / (2.0 * n),
            (CircleOperator::KStar | CircleOperator::DoubleLayer, 0) => 0.5,
            (CircleOperator::KStar | CircleOperator::DoubleLayer, _) => 0.0,
            (CircleOperator::Hypersingular, _) => n / (2.0 * r0),
        }
    }

    /// Multiplier of `cos(nθ)` in the potential at radius `r ≠ r0`. `None` for
    /// operators that only act on the boundary.
    pub fn at(&self, r: f64) -> Option<f64> {
        let (n, r0) = (self.n as i32, self.r0);
        let inside = r < r0;
        match self.op {
            CircleOperator::SingleLayer => Some(match (n, inside) {
                (0, true) => r0 * r0.ln(),
                (0, false) => r0 * r.ln(),
                (_, true) => -r0 / (2.0 * n as f64) * (r / r0).powi(n),
                (_, false) => -r0 / (2.0 * n as f64) * (r0 / r).powi(n),
            }),
            CircleOperator::DoubleLayer => Some(match (n, inside) {
                (0, true) => 1.0,
                (0, false) => 0.0,
                (_, true) => 0.5 * (r / r0).powi(n),
                (_, false) => -0.5 * (r0 / r).powi(n),
            }),
            CircleOperator::KStar | CircleOperator::Hypersingular => None,
        }
    }
}

/// `D[φ](x) + S[ψ](x)` at off-boundary points by the trapezoidal rule.
pub fn evaluate_potentials(
    grid: &QuadratureGrid,
    phi: &[f64],
    psi: &[f64],
    points: &[Point],
) -> Result<Vec<f64>> {
    let spacing = grid.max_spacing();
    let n = grid.len() as f64;
    points
        .par_iter()
        .map(|x| {
            let mut sum = 0.0;
            for j in 0..grid.len() {
                let d = grid.points[j] - x;
                let d2 = d.norm_squared();
                if d2.sqrt() < spacing {
                    return Err(Error::TooCloseToBoundary { x: x.x, y: x.y });
                }
                let h = grid.jacobian[j];
                sum += phi[j] * d.dot(&grid.normals[j]) / d2 * h + psi[j] * 0.5 * d2.ln() * h;
            }
            Ok(sum / n)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SecondKindSolution {
    pub x: BoundaryDensity,
    /// 1-norm condition number of `λI − A`.
    pub condition_number: f64,
    /// `max|(λI − A)x − rhs|`.
    pub residual: f64,
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `(λI − A)x = rhs` by LU with one step of iterative refinement. When
/// `rhs` is mean-zero the solution is projected onto mean-zero densities.
pub fn solve_second_kind(
    grid: &QuadratureGrid,
    a: &OperatorMatrix,
    lambda: f64,
    rhs: &[f64],
) -> Result<SecondKindSolution> {
    let n = a.len();
    let m = DMatrix::identity(n, n) * lambda - &a.entries;
    let lu = m.clone().lu();
    let inverse = lu.try_inverse().ok_or(Error::NearSingularSystem {
        condition_number: f64::INFINITY,
    })?;
    let condition_number = norm1(&m) * norm1(&inverse);
    if !(condition_number <= MAX_CONDITION) {
        return Err(Error::NearSingularSystem { condition_number });
    }
    let b = DVector::from_column_slice(rhs);
    let mut x = lu
        .solve(&b)
        .ok_or(Error::NearSingularSystem { condition_number })?;
    let r = &b - &m * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let mut x = x.as_slice().to_vec();
    if relative_mean(grid, rhs) < 1e-10 {
        project_mean_zero(grid, &mut x);
    }
    let residual = max_abs((&b - &m * DVector::from_column_slice(&x)).as_slice());
    if residual > 1e-10 * max_abs(rhs) {
        return Err(Error::NearSingularSystem { condition_number });
    }
    Ok(SecondKindSolution {
        x: BoundaryDensity::new(x),
        condition_number,
        residual,
    })
}
