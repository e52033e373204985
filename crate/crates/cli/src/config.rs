//! Run configuration: parsing, defaults and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shg2d::analysis::{Channel, ScanPath};
use shg2d::analytic::{DiskParams, RadiationCase};
use shg2d::background::HarmonicBackground;
use shg2d::geometry::StarBoundary;
use shg2d::solver::{Material, MIN_SOLVER_NODES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub index: u32,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub r0: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub modes: Vec<ModeConfig>,
}

/// One term `coeff·r^degree·cos(degree·θ)` of the background potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub degree: u32,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub variable: Channel,
    pub deltas: Vec<f64>,
    #[serde(default = "default_scan_path")]
    pub path: ScanPath,
}

fn default_scan_path() -> ScanPath {
    ScanPath::Analytic
}

fn default_grid_n() -> usize {
    256
}

fn default_m_max() -> u32 {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub boundary: BoundaryConfig,
    pub background: Vec<TermConfig>,
    pub eps_omega: f64,
    pub eps_2omega: f64,
    pub chi_perp: f64,
    pub chi_par: f64,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_m_max")]
    pub m_max: u32,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub scan: Option<ScanBlock>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug)]
pub enum ConfigError {
    Io(PathBuf, std::io::Error),
    Parse(serde_json::Error),
    Invalid(String),
    Model(shg2d::Error),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            ConfigError::Parse(e) => write!(f, "malformed config: {e}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
            ConfigError::Model(e) => write!(f, "invalid config: {e}"),
        }
    }
}

impl From<shg2d::Error> for ConfigError {
    fn from(e: shg2d::Error) -> Self {
        ConfigError::Model(e)
    }
}

/// Validated model objects built from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Setup {
    pub boundary: StarBoundary,
    pub background: HarmonicBackground,
    pub material: Material,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        serde_json::from_str(&text).map_err(ConfigError::Parse)
    }

    pub fn validate(&self) -> Result<Setup, ConfigError> {
        let b = &self.boundary;
        if !b.epsilon.is_finite() || b.epsilon < 0.0 {
            return Err(ConfigError::Invalid(
                "boundary.epsilon must be finite and >= 0".into(),
            ));
        }
        let boundary = StarBoundary::new(
            b.r0,
            b.epsilon,
            b.modes.iter().map(|m| (m.index, m.amplitude)),
        )?;
        let background =
            HarmonicBackground::new(self.background.iter().map(|t| (t.degree, t.coeff)))?;
        for (name, v) in [
            ("eps_omega", self.eps_omega),
            ("eps_2omega", self.eps_2omega),
            ("chi_perp", self.chi_perp),
            ("chi_par", self.chi_par),
        ] {
            if !v.is_finite() {
                return Err(ConfigError::Invalid(format!("{name} must be finite")));
            }
        }
        for v in [self.eps_omega, self.eps_2omega] {
            if v == -1.0 {
                return Err(shg2d::Error::ResonantPermittivity { value: v }.into());
            }
        }
        if self.eps_2omega == 1.0 {
            return Err(ConfigError::Invalid(
                "eps_2omega = 1 leaves no second-harmonic contrast".into(),
            ));
        }
        if self.grid_n < MIN_SOLVER_NODES || self.grid_n % 2 != 0 {
            return Err(shg2d::Error::InvalidGrid {
                n: self.grid_n,
                min: MIN_SOLVER_NODES,
            }
            .into());
        }
        if self.m_max == 0 || self.m_max as usize > self.grid_n / 4 {
            return Err(ConfigError::Invalid(format!(
                "m_max must lie in 1..={} for grid_n = {}",
                self.grid_n / 4,
                self.grid_n
            )));
        }
        if let Some(radii) = &self.radii {
            if radii.len() < 3 || radii.iter().any(|r| !(*r >= 5.0 * b.r0)) {
                return Err(ConfigError::Invalid(
                    "radii need at least three values, all >= 5·r0".into(),
                ));
            }
        }
        if let Some(scan) = &self.scan {
            if scan.deltas.len() < 4
                || scan.deltas.iter().any(|d| !(*d > 1e-6 && *d < 1e-1))
                || scan.deltas.windows(2).any(|w| w[1] >= w[0])
            {
                return Err(ConfigError::Invalid(
                    "scan.deltas needs at least four strictly decreasing values in (1e-6, 1e-1)"
                        .into(),
                ));
            }
        }
        Ok(Setup {
            boundary,
            background,
            material: Material {
                eps_omega: self.eps_omega,
                eps_2omega: self.eps_2omega,
                chi_perp: self.chi_perp,
                chi_par: self.chi_par,
            },
        })
    }
}

/// Closed-form case covered by the configuration, with the disk parameters
/// and the effective shape amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticCase {
    pub case: RadiationCase,
    pub params: DiskParams,
    pub shape_epsilon: f64,
}

impl Setup {
    pub fn analytic_case(&self) -> Result<AnalyticCase, ConfigError> {
        let terms = self.background.terms();
        let e = -terms[0].coeff;
        let params = DiskParams {
            e,
            r0: self.boundary.r0(),
            eps_omega: self.material.eps_omega,
            eps_2omega: self.material.eps_2omega,
            chi_perp: self.material.chi_perp,
            chi_par: self.material.chi_par,
        };
        let modes = self.boundary.modes();
        let (case, shape_epsilon) = match (terms, modes) {
            ([t], []) => (RadiationCase::Disk { ell: t.degree }, 0.0),
            ([t], [m]) => (
                RadiationCase::Shape {
                    n: m.index,
                    ell: t.degree,
                },
                self.boundary.epsilon() * m.amplitude,
            ),
            ([a, b], []) if a.coeff == b.coeff => (
                RadiationCase::TwoTerm {
                    m: a.degree,
                    ell: b.degree,
                },
                0.0,
            ),
            _ => {
                return Err(ConfigError::Invalid(
                    "closed forms cover a single shape mode under one background term, \
                     or a disk under one term or two equal-weight terms"
                        .into(),
                ))
            }
        };
        Ok(AnalyticCase {
            case,
            params,
            shape_epsilon,
        })
    }
}
