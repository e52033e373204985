//! Numerical SHG pipeline on star-shaped boundaries: the linear transmission
//! problem at ω, the surface sources it induces, and the transmission problem
//! at 2ω.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::background::HarmonicBackground;
use crate::error::{Error, Result};
use crate::geometry::{sample_grid, Point, QuadratureGrid, StarBoundary};
use crate::potentials::{
    arc_derivative, evaluate_potentials, hypersingular_apply_with, kstar_matrix, relative_mean,
    single_layer_matrix, solve_second_kind, BoundaryDensity, OperatorMatrix,
};
use crate::spectral;

pub const MIN_SOLVER_NODES: usize = 64;

/// Relative mean of the 2ω right-hand side tolerated before it is rejected.
pub const RHS_MEAN_TOL: f64 = 1e-8;

/// A boundary, its grid and the two operator matrices every solve needs.
#[derive(Debug)]
pub struct Discretization {
    pub boundary: StarBoundary,
    pub grid: QuadratureGrid,
    pub single_layer: OperatorMatrix,
    pub kstar: OperatorMatrix,
}

impl Discretization {
    pub fn new(boundary: &StarBoundary, n: usize) -> Result<Arc<Self>> {
        if n < MIN_SOLVER_NODES || n % 2 != 0 {
            return Err(Error::InvalidGrid {
                n,
                min: MIN_SOLVER_NODES,
            });
        }
        let grid = sample_grid(boundary, n)?;
        let single_layer = single_layer_matrix(&grid)?;
        let kstar = kstar_matrix(&grid)?;
        Ok(Arc::new(Self {
            boundary: boundary.clone(),
            grid,
            single_layer,
            kstar,
        }))
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// `(ε + 1)/(2(ε − 1))`.
pub fn lambda(eps: f64) -> f64 {
    (eps + 1.0) / (2.0 * (eps - 1.0))
}

#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub disc: Arc<Discretization>,
    pub background: HarmonicBackground,
    pub eps_omega: f64,
    pub phi: BoundaryDensity,
    /// `∂_ν u_ω` from inside, at the nodes.
    pub trace_dn_minus: Vec<f64>,
    /// `∂_T u_ω` from inside, at the nodes.
    pub trace_dt_minus: Vec<f64>,
    /// Condition number of `λ_ω I − K*`; `None` when no system was solved.
    pub condition_number: Option<f64>,
}

pub fn solve_linear(
    boundary: &StarBoundary,
    background: &HarmonicBackground,
    eps_omega: f64,
    n: usize,
) -> Result<LinearSolution> {
    solve_linear_on(&Discretization::new(boundary, n)?, background, eps_omega)
}

pub fn solve_linear_on(
    disc: &Arc<Discretization>,
    background: &HarmonicBackground,
    eps_omega: f64,
) -> Result<LinearSolution> {
    if !eps_omega.is_finite() {
        return Err(Error::InvalidParameter("ε_ω must be finite".into()));
    }
    if eps_omega == -1.0 {
        return Err(Error::ResonantPermittivity { value: eps_omega });
    }
    let g = &disc.grid;
    let dh: Vec<f64> = g
        .points
        .iter()
        .zip(&g.normals)
        .map(|(p, nu)| background.normal_derivative(p, nu))
        .collect();
    let (phi, condition_number) = if eps_omega == 1.0 {
        (vec![0.0; g.len()], None)
    } else {
        let sol = solve_second_kind(g, &disc.kstar, lambda(eps_omega), &dh)?;
        (sol.x.values, Some(sol.condition_number))
    };
    let kphi = disc.kstar.apply(&phi);
    let trace_dn_minus: Vec<f64> = (0..g.len())
        .map(|i| dh[i] - 0.5 * phi[i] + kphi[i])
        .collect();
    let sphi = disc.single_layer.apply(&phi);
    let on_boundary: Vec<f64> = g
        .points
        .iter()
        .zip(&sphi)
        .map(|(p, s)| background.evaluate(p) + s)
        .collect();
    let trace_dt_minus = arc_derivative(g, &on_boundary);
    Ok(LinearSolution {
        disc: Arc::clone(disc),
        background: background.clone(),
        eps_omega,
        phi: BoundaryDensity::new(phi),
        trace_dn_minus,
        trace_dt_minus,
        condition_number,
    })
}

impl LinearSolution {
    /// `u_ω = H + S[φ]` at off-boundary points.
    pub fn evaluate(&self, points: &[Point]) -> Result<Vec<f64>> {
        let zero = vec![0.0; self.disc.len()];
        let s = evaluate_potentials(&self.disc.grid, &zero, &self.phi, points)?;
        Ok(points
            .iter()
            .zip(s)
            .map(|(p, v)| self.background.evaluate(p) + v)
            .collect())
    }

    /// `max|∂_ν u₊ − ε_ω ∂_ν u₋|` relative to `max|∇H|` on the boundary.
    pub fn transmission_residual(&self) -> f64 {
        let g = &self.disc.grid;
        let grad_scale = g
            .points
            .iter()
            .map(|p| self.background.gradient(p).norm())
            .fold(0.0, f64::max);
        let residual = (0..g.len())
            .map(|i| {
                let outer = self.trace_dn_minus[i] + self.phi[i];
                (outer - self.eps_omega * self.trace_dn_minus[i]).abs()
            })
            .fold(0.0, f64::max);
        residual / grad_scale
    }
}

/// Nonlinear surface polarisation and charge at the nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSources {
    pub p_perp: Vec<f64>,
    pub p_par: Vec<f64>,
    pub sigma_s: Vec<f64>,
}

/// `P⊥ = χ⊥(ε_ω ∂_ν u₋)²`, `P∥ = 2χ∥(ε_ω ∂_ν u₋)(∂_T u₋)`, `σ^s = −(1/h) dP∥/dθ`.
pub fn surface_sources(lin: &LinearSolution, chi_perp: f64, chi_par: f64) -> SurfaceSources {
    let eo = lin.eps_omega;
    let p_perp: Vec<f64> = lin
        .trace_dn_minus
        .iter()
        .map(|dn| chi_perp * (eo * dn).powi(2))
        .collect();
    let p_par: Vec<f64> = lin
        .trace_dn_minus
        .iter()
        .zip(&lin.trace_dt_minus)
        .map(|(dn, dt)| 2.0 * chi_par * eo * dn * dt)
        .collect();
    let sigma_s = spectral::derivative(&p_par)
        .into_iter()
        .zip(&lin.disc.grid.jacobian)
        .map(|(d, h)| -d / h)
        .collect();
    SurfaceSources {
        p_perp,
        p_par,
        sigma_s,
    }
}

#[derive(Debug, Clone)]
pub struct SHSolution {
    pub disc: Arc<Discretization>,
    /// Double-layer density `−4πP⊥`, mean retained.
    pub phi: BoundaryDensity,
    pub psi: BoundaryDensity,
    pub eps_2omega: f64,
    pub sigma_s: Vec<f64>,
    pub condition_number: f64,
    /// Relative mean of the assembled right-hand side before the solve.
    pub rhs_relative_mean: f64,
}

pub fn solve_sh(
    boundary: &StarBoundary,
    sources: &SurfaceSources,
    eps_2omega: f64,
    n: usize,
) -> Result<SHSolution> {
    solve_sh_on(&Discretization::new(boundary, n)?, sources, eps_2omega)
}

pub fn solve_sh_on(
    disc: &Arc<Discretization>,
    sources: &SurfaceSources,
    eps_2omega: f64,
) -> Result<SHSolution> {
    if !eps_2omega.is_finite() || eps_2omega == 1.0 {
        return Err(Error::InvalidParameter(format!(
            "ε_2ω = {eps_2omega}: the second-harmonic density equation needs ε_2ω ≠ 1"
        )));
    }
    if eps_2omega == -1.0 {
        return Err(Error::ResonantPermittivity { value: eps_2omega });
    }
    let g = &disc.grid;
    if sources.p_perp.len() != g.len() || sources.sigma_s.len() != g.len() {
        return Err(Error::InvalidParameter(format!(
            "sources sampled on {} nodes, grid has {}",
            sources.p_perp.len(),
            g.len()
        )));
    }
    let phi: Vec<f64> = sources.p_perp.iter().map(|p| -4.0 * PI * p).collect();
    let dd = hypersingular_apply_with(g, &disc.single_layer, &phi)?;
    let rhs: Vec<f64> = dd
        .iter()
        .zip(&sources.sigma_s)
        .map(|(d, s)| d - 4.0 * PI * s / (eps_2omega - 1.0))
        .collect();
    let rhs_relative_mean = relative_mean(g, &rhs);
    if rhs_relative_mean > RHS_MEAN_TOL {
        return Err(Error::MeanZeroViolation {
            relative_mean: rhs_relative_mean,
        });
    }
    let sol = solve_second_kind(g, &disc.kstar, lambda(eps_2omega), &rhs)?;
    Ok(SHSolution {
        disc: Arc::clone(disc),
        phi: BoundaryDensity::new(phi),
        psi: sol.x,
        eps_2omega,
        sigma_s: sources.sigma_s.clone(),
        condition_number: sol.condition_number,
        rhs_relative_mean,
    })
}

impl SHSolution {
    /// `u_2ω = D[φ] + S[ψ]` at off-boundary points.
    pub fn evaluate(&self, points: &[Point]) -> Result<Vec<f64>> {
        evaluate_potentials(&self.disc.grid, &self.phi, &self.psi, points)
    }

    /// Relative residual of `∂_ν u₊ − ε_2ω ∂_ν u₋ = −4πσ^s` at the nodes. The
    /// value jump `u₊ − u₋ = −φ` holds by construction.
    pub fn flux_jump_residual(&self) -> Result<f64> {
        let g = &self.disc.grid;
        let dd = hypersingular_apply_with(g, &self.disc.single_layer, &self.phi)?;
        let kpsi = self.disc.kstar.apply(&self.psi);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..g.len() {
            let plus = dd[i] + 0.5 * self.psi[i] + kpsi[i];
            let minus = dd[i] - 0.5 * self.psi[i] + kpsi[i];
            let target = -4.0 * PI * self.sigma_s[i];
            worst = worst.max((plus - self.eps_2omega * minus - target).abs());
            scale = scale.max(plus.abs()).max((self.eps_2omega * minus).abs());
        }
        Ok(if scale == 0.0 { 0.0 } else { worst / scale })
    }
}

/// Permittivities and surface susceptibilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub eps_omega: f64,
    pub eps_2omega: f64,
    pub chi_perp: f64,
    pub chi_par: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub boundary: StarBoundary,
    pub background: HarmonicBackground,
    pub material: Material,
    pub grid_n: usize,
}

pub fn shg_pipeline(cfg: &PipelineConfig) -> Result<(LinearSolution, SHSolution)> {
    let disc = Discretization::new(&cfg.boundary, cfg.grid_n)?;
    shg_pipeline_on(&disc, &cfg.background, &cfg.material)
}

/// Runs the pipeline on an existing discretisation.
pub fn shg_pipeline_on(
    disc: &Arc<Discretization>,
    background: &HarmonicBackground,
    material: &Material,
) -> Result<(LinearSolution, SHSolution)> {
    let lin = solve_linear_on(disc, background, material.eps_omega)?;
    let src = surface_sources(&lin, material.chi_perp, material.chi_par);
    let sh = solve_sh_on(disc, &src, material.eps_2omega)?;
    Ok((lin, sh))
}
