//! Far-field multipole spectra, decay-exponent fits, radiation classification
//! and plasmon-resonance scans.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, predict_radiation, DiskParams, RadiationCase};
use crate::background::HarmonicBackground;
use crate::error::{Error, Result};
use crate::geometry::{Point, QuadratureGrid, StarBoundary};
use crate::solver::{shg_pipeline, Discretization, Material, PipelineConfig, SHSolution};
use crate::{solver, spectral};

/// Default relative threshold for the lowest radiating mode.
pub const DEFAULT_REL_TOL: f64 = 1e-7;

/// Required ratio between the resolved density content and the grid's
/// spectral floor.
pub const RESOLUTION_MARGIN: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipoleEntry {
    pub m: u32,
    pub cos_coeff: f64,
    pub sin_coeff: f64,
}

impl MultipoleEntry {
    pub fn amplitude(&self) -> f64 {
        self.cos_coeff.hypot(self.sin_coeff)
    }
}

/// Exterior expansion `a ln r + Σ (c_m cos mθ + s_m sin mθ)/r^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipoleSpectrum {
    pub entries: Vec<MultipoleEntry>,
    pub monopole_log_coeff: f64,
}

impl MultipoleSpectrum {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
            monopole_log_coeff: 0.0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, m: u32) -> Option<&MultipoleEntry> {
        self.entries.iter().find(|e| e.m == m)
    }

    pub fn cos_coeff(&self, m: u32) -> f64 {
        self.get(m).map_or(0.0, |e| e.cos_coeff)
    }

    pub fn amplitude(&self, m: u32) -> f64 {
        self.get(m).map_or(0.0, MultipoleEntry::amplitude)
    }

    pub fn max_amplitude(&self) -> f64 {
        self.entries
            .iter()
            .map(MultipoleEntry::amplitude)
            .fold(0.0, f64::max)
    }

    /// `(self − other)·s`, entry by entry; both spectra must list the same modes.
    pub fn scaled_difference(&self, other: &Self, s: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let o = other.get(e.m).copied().unwrap_or(MultipoleEntry {
                    m: e.m,
                    cos_coeff: 0.0,
                    sin_coeff: 0.0,
                });
                MultipoleEntry {
                    m: e.m,
                    cos_coeff: (e.cos_coeff - o.cos_coeff) * s,
                    sin_coeff: (e.sin_coeff - o.sin_coeff) * s,
                }
            })
            .collect();
        Self {
            entries,
            monopole_log_coeff: (self.monopole_log_coeff - other.monopole_log_coeff) * s,
        }
    }
}

pub fn multipole_moments(sh: &SHSolution, m_max: u32) -> Result<MultipoleSpectrum> {
    multipole_moments_from(&sh.disc.grid, &sh.phi, &sh.psi, m_max)
}

fn check_resolution(n: usize, m_max: u32, densities: &[&[f64]]) -> Result<()> {
    let floor_from = 7 * n / 16;
    let (mut signal, mut floor) = (0.0f64, 0.0f64);
    for d in densities {
        let c = spectral::cos_sin_coefficients(d);
        for (k, (a, b)) in c.iter().enumerate() {
            let amp = a.hypot(*b);
            if k <= m_max as usize {
                signal = signal.max(amp);
            }
            if k >= floor_from {
                floor = floor.max(amp);
            }
        }
    }
    if floor > 0.0 && signal < RESOLUTION_MARGIN * floor {
        return Err(Error::ResolutionLoss {
            tail_ratio: floor / signal,
        });
    }
    Ok(())
}

/// Exact exterior moments of `D[φ] + S[ψ]` from the multipole expansion of
/// `ln|x − y|`: `c_m + i s_m = −(1/2πm) ∮ (ψ y^m + φ m y^{m−1} ν) ds` in
/// complex notation.
pub fn multipole_moments_from(
    grid: &QuadratureGrid,
    phi: &[f64],
    psi: &[f64],
    m_max: u32,
) -> Result<MultipoleSpectrum> {
    let n = grid.len();
    if m_max == 0 || m_max as usize > n / 4 {
        return Err(Error::InvalidParameter(format!(
            "m_max = {m_max} must lie in 1..={}",
            n / 4
        )));
    }
    if phi.iter().chain(psi).all(|v| *v == 0.0) {
        return Ok(MultipoleSpectrum::empty());
    }
    check_resolution(n, m_max, &[phi, psi])?;
    let w = grid.weights();
    let z: Vec<Complex64> = grid
        .points
        .iter()
        .map(|p| Complex64::new(p.x, p.y))
        .collect();
    let nu: Vec<Complex64> = grid
        .normals
        .iter()
        .map(|p| Complex64::new(p.x, p.y))
        .collect();
    let mut zpow = vec![Complex64::new(1.0, 0.0); n];
    let mut entries = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        let mf = m as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            // zpow holds z^{m−1}
            acc += w[j] * (psi[j] * zpow[j] * z[j] + phi[j] * mf * zpow[j] * nu[j]);
            zpow[j] *= z[j];
        }
        let c = -acc / (2.0 * PI * mf);
        entries.push(MultipoleEntry {
            m,
            cos_coeff: c.re,
            sin_coeff: c.im,
        });
    }
    let monopole_log_coeff = grid.integrate(psi) / (2.0 * PI);
    Ok(MultipoleSpectrum {
        entries,
        monopole_log_coeff,
    })
}

fn circle_points(radius: f64, samples: usize) -> Vec<Point> {
    (0..samples)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / samples as f64;
            Point::new(radius * t.cos(), radius * t.sin())
        })
        .collect()
}

/// Spectrum from Fourier coefficients of the field sampled on `|x| = radius`,
/// rescaled by `radius^m`. The mean is attributed to the `ln r` term.
pub fn far_field_coefficients(
    eval: impl Fn(&[Point]) -> Result<Vec<f64>>,
    radius: f64,
    m_max: u32,
    samples: usize,
) -> Result<MultipoleSpectrum> {
    if samples < 4 * m_max as usize {
        return Err(Error::InvalidParameter(format!(
            "{samples} samples cannot resolve mode {m_max}"
        )));
    }
    let v = eval(&circle_points(radius, samples))?;
    let c = spectral::cos_sin_coefficients(&v);
    let entries = (1..=m_max)
        .map(|m| {
            let s = radius.powi(m as i32);
            MultipoleEntry {
                m,
                cos_coeff: c[m as usize].0 * s,
                sin_coeff: c[m as usize].1 * s,
            }
        })
        .collect();
    Ok(MultipoleSpectrum {
        entries,
        monopole_log_coeff: c[0].0 / radius.ln(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    /// RMS deviation of `ln max|u|` from the fitted line.
    pub residual: f64,
}

/// Least-squares `(slope, intercept, rms residual)`.
fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Slope of `ln max_θ|u(r, θ)|` against `ln r` over geometrically spaced radii.
pub fn decay_exponent(
    eval: impl Fn(&[Point]) -> Result<Vec<f64>>,
    radii: &[f64],
    r0: f64,
) -> Result<DecayFit> {
    if radii.len() < 3 {
        return Err(Error::InvalidParameter("need at least three radii".into()));
    }
    if radii.iter().any(|&r| !(r >= 5.0 * r0)) {
        return Err(Error::InvalidParameter(format!(
            "all radii must be >= 5·r0 = {}",
            5.0 * r0
        )));
    }
    let q = radii[1] / radii[0];
    if q <= 1.0
        || radii
            .windows(2)
            .any(|w| ((w[1] / w[0]) / q - 1.0).abs() > 1e-6)
    {
        return Err(Error::InvalidParameter(
            "radii must be increasing and geometrically spaced".into(),
        ));
    }
    let mut ys = Vec::with_capacity(radii.len());
    for &r in radii {
        let peak = eval(&circle_points(r, 256))?
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if !(peak >= 1e-300) {
            return Err(Error::DegenerateFit(format!("field underflows at r = {r}")));
        }
        ys.push(peak.ln());
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let (exponent, _, residual) = fit_line(&xs, &ys);
    Ok(DecayFit { exponent, residual })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub lowest_mode: u32,
    pub label: String,
}

pub fn radiation_label(m: u32) -> String {
    if m == 1 {
        "dipole".to_string()
    } else {
        format!("2^{m}-pole")
    }
}

/// Lowest mode whose amplitude reaches `rel_tol` of the largest one.
pub fn classify(spectrum: &MultipoleSpectrum, rel_tol: f64) -> Result<Classification> {
    let peak = spectrum.max_amplitude();
    if spectrum.is_empty() || peak == 0.0 {
        return Err(Error::EmptySpectrum);
    }
    let lowest = spectrum
        .entries
        .iter()
        .find(|e| e.amplitude() >= rel_tol * peak)
        .map(|e| e.m)
        .ok_or(Error::EmptySpectrum)?;
    Ok(Classification {
        lowest_mode: lowest,
        label: radiation_label(lowest),
    })
}

/// First-order shape response `(u(+ε) − u(−ε))/(2ε)`, where `−ε` negates every
/// shape amplitude. Even orders in `ε`, including the unperturbed field, cancel.
#[derive(Debug, Clone)]
pub struct FirstOrderResponse {
    pub plus: SHSolution,
    pub minus: SHSolution,
    pub epsilon: f64,
}

pub fn first_order_response(cfg: &PipelineConfig) -> Result<FirstOrderResponse> {
    let epsilon = cfg.boundary.epsilon();
    if !(epsilon > 0.0) || cfg.boundary.modes().is_empty() {
        return Err(Error::InvalidParameter(
            "first-order response needs a perturbed boundary".into(),
        ));
    }
    let mirrored = PipelineConfig {
        boundary: cfg.boundary.mirrored(),
        ..cfg.clone()
    };
    let (plus, minus) = rayon::join(|| shg_pipeline(cfg), || shg_pipeline(&mirrored));
    Ok(FirstOrderResponse {
        plus: plus?.1,
        minus: minus?.1,
        epsilon,
    })
}

impl FirstOrderResponse {
    pub fn spectrum(&self, m_max: u32) -> Result<MultipoleSpectrum> {
        let p = multipole_moments(&self.plus, m_max)?;
        let m = multipole_moments(&self.minus, m_max)?;
        Ok(p.scaled_difference(&m, 0.5 / self.epsilon))
    }

    pub fn evaluate(&self, points: &[Point]) -> Result<Vec<f64>> {
        let p = self.plus.evaluate(points)?;
        let m = self.minus.evaluate(points)?;
        Ok(p.iter()
            .zip(&m)
            .map(|(a, b)| (a - b) * 0.5 / self.epsilon)
            .collect())
    }

    pub fn condition_number(&self) -> f64 {
        self.plus.condition_number.max(self.minus.condition_number)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    /// `ε_ω = −1 + δ`.
    Omega,
    /// `ε_2ω = −1 + δ`.
    TwoOmega,
    /// `ε_ω = ε_2ω = −1 + δ`.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanPath {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Base parameters; the scanned permittivities are overwritten per point.
    pub params: DiskParams,
    pub case: RadiationCase,
    pub path: ScanPath,
    pub grid_n: usize,
    /// Shape amplitude used by the numeric path for shape cases.
    pub shape_epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub delta: f64,
    pub mode: u32,
    pub coefficient: Option<f64>,
    pub condition_number: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceScan {
    pub channel: Channel,
    pub points: Vec<ScanPoint>,
    /// Offsets and amplitudes that entered the fit.
    pub deltas: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub fitted_slope: f64,
    pub fit_residual: f64,
    pub predicted_slope: f64,
    /// Candidate `(ω, 2ω)` exponent pairs for the simultaneous channel.
    pub candidate_branches: Vec<(u32, u32)>,
}

fn with_delta(p: &DiskParams, channel: Channel, delta: f64) -> DiskParams {
    let mut q = *p;
    let eps = -1.0 + delta;
    match channel {
        Channel::Omega => q.eps_omega = eps,
        Channel::TwoOmega => q.eps_2omega = eps,
        Channel::Both => {
            q.eps_omega = eps;
            q.eps_2omega = eps;
        }
    }
    q
}

/// Lowest-mode amplitude from the closed forms.
pub fn analytic_lowest_coefficient(p: &DiskParams, case: RadiationCase) -> Result<(u32, f64)> {
    let mode = predict_radiation(case)?.lowest_mode;
    let c = match case {
        RadiationCase::Disk { ell } => analytic::sh_leading(p, ell)?.exterior_coefficient(mode),
        RadiationCase::Shape { n, ell } => analytic::sh_first_order(p, n, ell)?.amplitude(mode),
        RadiationCase::TwoTerm { m, ell } => {
            analytic::sh_two_term(p, m, ell)?.exterior_coefficient(mode)
        }
    };
    Ok((mode, c))
}

/// Background and boundary that realise `case` for the numeric solver.
pub fn numeric_setup(
    p: &DiskParams,
    case: RadiationCase,
    shape_epsilon: f64,
) -> Result<(StarBoundary, HarmonicBackground)> {
    Ok(match case {
        RadiationCase::Disk { ell } => (
            StarBoundary::circle(p.r0)?,
            HarmonicBackground::single(ell, p.e),
        ),
        RadiationCase::Shape { n, ell } => (
            StarBoundary::new(p.r0, shape_epsilon, [(n, 1.0)])?,
            HarmonicBackground::single(ell, p.e),
        ),
        RadiationCase::TwoTerm { m, ell } => (
            StarBoundary::circle(p.r0)?,
            HarmonicBackground::two_term(m, ell, p.e)?,
        ),
    })
}

pub fn material(p: &DiskParams) -> Material {
    Material {
        eps_omega: p.eps_omega,
        eps_2omega: p.eps_2omega,
        chi_perp: p.chi_perp,
        chi_par: p.chi_par,
    }
}

/// Lowest-mode amplitude from the numeric solver: the leading coefficient for
/// unperturbed disks, the first-order coefficient for shape cases.
pub fn numeric_lowest_coefficient(
    p: &DiskParams,
    case: RadiationCase,
    grid_n: usize,
    shape_epsilon: f64,
) -> Result<(u32, f64, f64)> {
    let mode = predict_radiation(case)?.lowest_mode;
    let (boundary, background) = numeric_setup(p, case, shape_epsilon)?;
    let cfg = PipelineConfig {
        boundary,
        background,
        material: material(p),
        grid_n,
    };
    match case {
        RadiationCase::Shape { .. } => {
            let r = first_order_response(&cfg)?;
            Ok((
                mode,
                r.spectrum(mode)?.cos_coeff(mode),
                r.condition_number(),
            ))
        }
        _ => {
            let disc = Discretization::new(&cfg.boundary, grid_n)?;
            let (lin, sh) = solver::shg_pipeline_on(&disc, &cfg.background, &cfg.material)?;
            let cond = lin.condition_number.unwrap_or(1.0).max(sh.condition_number);
            Ok((mode, multipole_moments(&sh, mode)?.cos_coeff(mode), cond))
        }
    }
}

fn validate_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.len() < 4 {
        return Err(Error::InvalidParameter(
            "a resonance scan needs at least four offsets".into(),
        ));
    }
    if deltas.iter().any(|&d| !(d > 1e-6 && d < 1e-1)) {
        return Err(Error::InvalidParameter(
            "offsets must lie in (1e-6, 1e-1)".into(),
        ));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "offsets must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// Sets `ε = −1 + δ` on the chosen channel for each offset, records the
/// lowest-mode amplitude and fits `ln|amplitude|` against `ln δ`. Points that
/// fail are kept in `points` with their error and left out of the fit.
pub fn resonance_scan(cfg: &ScanConfig, channel: Channel, deltas: &[f64]) -> Result<ResonanceScan> {
    validate_deltas(deltas)?;
    let prediction = predict_radiation(cfg.case)?;
    let exps = &prediction.exponents;
    let predicted = match channel {
        Channel::Omega => exps.omega,
        Channel::TwoOmega => exps.two_omega,
        Channel::Both => exps.both,
    };
    let points: Vec<ScanPoint> = deltas
        .par_iter()
        .map(|&delta| {
            let p = with_delta(&cfg.params, channel, delta);
            let result = match cfg.path {
                ScanPath::Analytic => {
                    analytic_lowest_coefficient(&p, cfg.case).map(|(m, c)| (m, c, None))
                }
                ScanPath::Numeric => {
                    numeric_lowest_coefficient(&p, cfg.case, cfg.grid_n, cfg.shape_epsilon)
                        .map(|(m, c, k)| (m, c, Some(k)))
                }
            };
            match result {
                Ok((mode, c, k)) => ScanPoint {
                    delta,
                    mode,
                    coefficient: Some(c),
                    condition_number: k,
                    error: None,
                },
                Err(e) => ScanPoint {
                    delta,
                    mode: prediction.lowest_mode,
                    coefficient: None,
                    condition_number: match e {
                        Error::NearSingularSystem { condition_number } => Some(condition_number),
                        _ => None,
                    },
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let (fit_d, fit_c): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter_map(|pt| {
            pt.coefficient
                .filter(|c| *c != 0.0 && c.is_finite())
                .map(|c| (pt.delta, c))
        })
        .unzip();
    if fit_d.len() < 4 {
        return Err(Error::DegenerateFit(format!(
            "only {} usable scan points",
            fit_d.len()
        )));
    }
    let span = fit_d.iter().cloned().fold(0.0, f64::max)
        / fit_d.iter().cloned().fold(f64::INFINITY, f64::min);
    if span.log10() < 2.0 - 1e-9 {
        return Err(Error::DegenerateFit(format!(
            "usable offsets span {:.2} decades, need 2",
            span.log10()
        )));
    }
    let xs: Vec<f64> = fit_d.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = fit_c.iter().map(|c| c.abs().ln()).collect();
    let (slope, _, residual) = fit_line(&xs, &ys);
    Ok(ResonanceScan {
        channel,
        points,
        deltas: fit_d,
        coefficients: fit_c,
        fitted_slope: slope,
        fit_residual: residual,
        predicted_slope: -(predicted as f64),
        candidate_branches: if channel == Channel::Both {
            exps.both_branches.clone()
        } else {
            Vec::new()
        },
    })
}

/// Relative monopole content `|a| / max amplitude`; zero for empty spectra.
pub fn monopole_ratio(spectrum: &MultipoleSpectrum) -> f64 {
    let peak = spectrum.max_amplitude();
    if peak == 0.0 {
        0.0
    } else {
        spectrum.monopole_log_coeff.abs() / peak
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_grid;

    fn p1_cfg(boundary: StarBoundary, n: usize) -> PipelineConfig {
        PipelineConfig {
            boundary,
            background: HarmonicBackground::uniform(1.0),
            material: material(&DiskParams::P1),
            grid_n: n,
        }
    }

    #[test]
    fn disk_spectrum_is_pure_quadrupole() {
        let (_, sh) = shg_pipeline(&p1_cfg(StarBoundary::circle(1.0).unwrap(), 128)).unwrap();
        let s = multipole_moments(&sh, 8).unwrap();
        assert!((s.cos_coeff(2) - 8.0 * PI / 3.0).abs() < 1e-12);
        for e in &s.entries {
            if e.m != 2 {
                assert!(e.amplitude() < 1e-12, "mode {}", e.m);
            }
        }
        assert!(monopole_ratio(&s) < 1e-10);
        let c = classify(&s, DEFAULT_REL_TOL).unwrap();
        assert_eq!((c.lowest_mode, c.label.as_str()), (2, "2^2-pole"));
    }

    #[test]
    fn zero_densities_give_empty_spectrum() {
        let g = sample_grid(&StarBoundary::circle(1.0).unwrap(), 64).unwrap();
        let z = vec![0.0; 64];
        let s = multipole_moments_from(&g, &z, &z, 4).unwrap();
        assert!(s.is_empty());
        assert!(matches!(classify(&s, 1e-7), Err(Error::EmptySpectrum)));
        assert!(multipole_moments_from(&g, &z, &z, 17).is_err());
    }

    #[test]
    fn unresolved_density_is_rejected() {
        let g = sample_grid(&StarBoundary::circle(1.0).unwrap(), 64).unwrap();
        let noisy: Vec<f64> = (0..64)
            .map(|j| if j % 2 == 0 { 1e-3 } else { -1e-3 })
            .collect();
        let tiny: Vec<f64> = g.theta.iter().map(|t| 1e-9 * t.cos()).collect();
        assert!(matches!(
            multipole_moments_from(&g, &tiny, &noisy, 4),
            Err(Error::ResolutionLoss { .. })
        ));
    }

    #[test]
    fn moments_match_far_field_sampling() {
        let b = StarBoundary::new(1.0, 0.05, [(3, 1.0)]).unwrap();
        let mut cfg = p1_cfg(b, 256);
        cfg.material.chi_par = 0.7;
        let (_, sh) = shg_pipeline(&cfg).unwrap();
        let mom = multipole_moments(&sh, 6).unwrap();
        let far = far_field_coefficients(|p| sh.evaluate(p), 50.0, 6, 128).unwrap();
        for m in 1..=4 {
            let (a, b) = (mom.cos_coeff(m), far.cos_coeff(m));
            assert!(
                (a - b).abs() < 1e-6 * a.abs().max(1e-3),
                "mode {m}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn synthetic_decay() {
        let f = |pts: &[Point]| -> Result<Vec<f64>> {
            Ok(pts
                .iter()
                .map(|p| 2.0 * (3.0 * p.y.atan2(p.x)).cos() / p.norm().powi(3))
                .collect())
        };
        let fit = decay_exponent(f, &[10.0, 20.0, 40.0], 1.0).unwrap();
        assert!((fit.exponent + 3.0).abs() < 1e-12);
        assert!(decay_exponent(f, &[10.0, 20.0], 1.0).is_err());
        assert!(decay_exponent(f, &[2.0, 4.0, 8.0], 1.0).is_err());
        let zero = |pts: &[Point]| -> Result<Vec<f64>> { Ok(vec![0.0; pts.len()]) };
        assert!(matches!(
            decay_exponent(zero, &[10.0, 20.0, 40.0], 1.0),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn classify_labels() {
        let s = MultipoleSpectrum {
            entries: vec![
                MultipoleEntry {
                    m: 1,
                    cos_coeff: 1e-12,
                    sin_coeff: 0.0,
                },
                MultipoleEntry {
                    m: 2,
                    cos_coeff: 0.0,
                    sin_coeff: -3.0,
                },
                MultipoleEntry {
                    m: 3,
                    cos_coeff: 1.0,
                    sin_coeff: 0.0,
                },
            ],
            monopole_log_coeff: 0.0,
        };
        assert_eq!(classify(&s, 1e-7).unwrap().lowest_mode, 2);
        assert_eq!(classify(&s, 1e-14).unwrap().label, "dipole");
    }

    #[test]
    fn trefoil_first_order_dipole() {
        let cfg = p1_cfg(StarBoundary::new(1.0, 1e-3, [(3, 1.0)]).unwrap(), 128);
        let r = first_order_response(&cfg).unwrap();
        let s = r.spectrum(6).unwrap();
        let want = -40.0 * PI / 9.0;
        assert!(
            (s.cos_coeff(1) - want).abs() < 1e-4 * want.abs(),
            "{}",
            s.cos_coeff(1)
        );
        assert_eq!(classify(&s, DEFAULT_REL_TOL).unwrap().lowest_mode, 1);
    }

    #[test]
    fn scan_validation() {
        let cfg = ScanConfig {
            params: DiskParams::P1,
            case: RadiationCase::Shape { n: 3, ell: 1 },
            path: ScanPath::Analytic,
            grid_n: 128,
            shape_epsilon: 1e-7,
        };
        assert!(resonance_scan(&cfg, Channel::Omega, &[1e-2, 1e-3, 1e-4]).is_err());
        assert!(resonance_scan(&cfg, Channel::Omega, &[1e-4, 1e-3, 1e-2, 1e-5]).is_err());
        assert!(resonance_scan(&cfg, Channel::Omega, &[0.5, 1e-3, 1e-4, 1e-5]).is_err());
        let s = resonance_scan(&cfg, Channel::Omega, &[1e-2, 1e-3, 1e-4, 1e-5]).unwrap();
        assert!((s.fitted_slope + 3.0).abs() < 0.05);
        assert_eq!(s.predicted_slope, -3.0);
    }

    #[test]
    fn analytic_two_term_scan() {
        let cfg = ScanConfig {
            params: DiskParams::P1,
            case: RadiationCase::TwoTerm { m: 1, ell: 2 },
            path: ScanPath::Analytic,
            grid_n: 128,
            shape_epsilon: 1e-7,
        };
        let s = resonance_scan(&cfg, Channel::Omega, &[1e-2, 1e-3, 1e-4, 1e-5]).unwrap();
        assert!((s.fitted_slope + 2.0).abs() < 0.05, "{}", s.fitted_slope);
    }
}
