//! Subcommand bodies. Each returns a serializable report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use shg2d::analysis::{
    classify, decay_exponent, multipole_moments, radiation_label, resonance_scan, Classification,
    DecayFit, MultipoleSpectrum, ResonanceScan, ScanConfig, DEFAULT_REL_TOL,
};
use shg2d::analytic::{self, ModeAmplitude, RadiationCase, RadiationPrediction};
use shg2d::background::{relative_symmetry_degree, RelativeKind};
use shg2d::geometry::{default_tolerance, symmetry_degree, Point, SymmetryReport, DEFAULT_Q_MAX};
use shg2d::solver::{self, Discretization};

use crate::config::{AnalyticCase, ConfigError, RunConfig, Setup};

pub const SCHEMA_VERSION: &str = "shg2d/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficient {
    pub mode: u32,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub case: RadiationCase,
    pub prediction: RadiationPrediction,
    pub label: String,
    pub lambda_omega: f64,
    pub lambda_2omega: f64,
    pub shape_epsilon: f64,
    /// Exterior coefficients of the unperturbed field.
    pub leading: Vec<ModeCoefficient>,
    /// First-order amplitudes `M_m`; empty for disks.
    pub first_order: Vec<ModeAmplitude>,
    /// `leading + shape_epsilon·M_m`.
    pub coefficients: Vec<ModeCoefficient>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub grid_n: usize,
    pub spectrum: MultipoleSpectrum,
    pub classification: Option<Classification>,
    pub linear_condition_number: Option<f64>,
    pub sh_condition_number: f64,
    pub transmission_residual: f64,
    pub flux_jump_residual: f64,
    pub decay: Option<DecayFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub mode: u32,
    pub analytic: f64,
    pub numeric: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub analytic: AnalyticReport,
    pub numeric: SolveReport,
    pub modes: Vec<ModeComparison>,
    /// Largest numeric amplitude among modes without a closed-form prediction.
    pub max_unpredicted_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeDegree {
    pub kind: RelativeKind,
    pub a: u32,
    pub b: u32,
    pub degree: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryOutput {
    pub boundary: SymmetryReport,
    pub background_symmetry_order: u32,
    pub relative_degrees: Vec<RelativeDegree>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Analytic(AnalyticReport),
    Solve(SolveReport),
    Compare(CompareReport),
    Scan(ResonanceScan),
    Symmetry(SymmetryOutput),
}

#[derive(Debug)]
pub enum CommandError {
    Config(ConfigError),
    Numeric(shg2d::Error),
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Config(e)
    }
}

/// Input errors surfacing from the model are configuration errors.
impl From<shg2d::Error> for CommandError {
    fn from(e: shg2d::Error) -> Self {
        if e.is_input_error() {
            CommandError::Config(ConfigError::Model(e))
        } else {
            CommandError::Numeric(e)
        }
    }
}

fn field_coefficients(f: &analytic::AnalyticField) -> BTreeMap<u32, f64> {
    f.radiating_modes()
        .into_iter()
        .map(|m| (m, f.exterior_coefficient(m)))
        .collect()
}

fn to_list(map: &BTreeMap<u32, f64>) -> Vec<ModeCoefficient> {
    map.iter()
        .map(|(&mode, &coefficient)| ModeCoefficient { mode, coefficient })
        .collect()
}

pub fn analytic(setup: &Setup) -> Result<AnalyticReport, CommandError> {
    let AnalyticCase {
        case,
        params,
        shape_epsilon,
    } = setup.analytic_case()?;
    let prediction = analytic::predict_radiation(case)?;
    let (leading, first_order) = match case {
        RadiationCase::Disk { ell } => (
            field_coefficients(&analytic::sh_leading(&params, ell)?),
            Vec::new(),
        ),
        RadiationCase::TwoTerm { m, ell } => (
            field_coefficients(&analytic::sh_two_term(&params, m, ell)?),
            Vec::new(),
        ),
        RadiationCase::Shape { n, ell } => (
            field_coefficients(&analytic::sh_leading(&params, ell)?),
            analytic::sh_first_order(&params, n, ell)?.entries,
        ),
    };
    let mut total = leading.clone();
    for e in &first_order {
        *total.entry(e.mode).or_insert(0.0) += shape_epsilon * e.amplitude;
    }
    Ok(AnalyticReport {
        case,
        label: radiation_label(prediction.lowest_mode),
        prediction,
        lambda_omega: params.lambda_omega(),
        lambda_2omega: params.lambda_2omega(),
        shape_epsilon,
        leading: to_list(&leading),
        first_order,
        coefficients: to_list(&total),
    })
}

pub fn solve(cfg: &RunConfig, setup: &Setup) -> Result<SolveReport, CommandError> {
    let disc = Discretization::new(&setup.boundary, cfg.grid_n)?;
    let (lin, sh) = solver::shg_pipeline_on(&disc, &setup.background, &setup.material)?;
    let spectrum = multipole_moments(&sh, cfg.m_max)?;
    let classification = if spectrum.max_amplitude() > 0.0 {
        Some(classify(&spectrum, DEFAULT_REL_TOL)?)
    } else {
        None
    };
    let decay = match &cfg.radii {
        Some(radii) => Some(decay_exponent(
            |p: &[Point]| sh.evaluate(p),
            radii,
            setup.boundary.r0(),
        )?),
        None => None,
    };
    Ok(SolveReport {
        grid_n: cfg.grid_n,
        classification,
        linear_condition_number: lin.condition_number,
        sh_condition_number: sh.condition_number,
        transmission_residual: lin.transmission_residual(),
        flux_jump_residual: sh.flux_jump_residual()?,
        decay,
        spectrum,
    })
}

pub fn compare(cfg: &RunConfig, setup: &Setup) -> Result<CompareReport, CommandError> {
    let a = analytic(setup)?;
    let n = solve(cfg, setup)?;
    let predicted: BTreeMap<u32, f64> = a
        .coefficients
        .iter()
        .filter(|c| c.coefficient != 0.0)
        .map(|c| (c.mode, c.coefficient))
        .collect();
    let modes = predicted
        .iter()
        .filter(|(m, _)| **m <= cfg.m_max)
        .map(|(&mode, &want)| {
            let got = n.spectrum.cos_coeff(mode);
            ModeComparison {
                mode,
                analytic: want,
                numeric: got,
                relative_error: (got - want).abs() / want.abs(),
            }
        })
        .collect();
    let max_unpredicted_amplitude = n
        .spectrum
        .entries
        .iter()
        .filter(|e| !predicted.contains_key(&e.m))
        .map(|e| e.amplitude())
        .fold(0.0, f64::max);
    Ok(CompareReport {
        analytic: a,
        numeric: n,
        modes,
        max_unpredicted_amplitude,
    })
}

pub fn scan(cfg: &RunConfig, setup: &Setup) -> Result<ResonanceScan, CommandError> {
    let block = cfg
        .scan
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("the scan command needs a scan block".into()))?;
    let ac = setup.analytic_case()?;
    let shape_epsilon = if ac.shape_epsilon != 0.0 {
        ac.shape_epsilon.abs()
    } else {
        1e-7
    };
    let sc = ScanConfig {
        params: ac.params,
        case: ac.case,
        path: block.path,
        grid_n: cfg.grid_n,
        shape_epsilon,
    };
    Ok(resonance_scan(&sc, block.variable, &block.deltas)?)
}

pub fn symmetry(setup: &Setup) -> SymmetryOutput {
    let boundary = symmetry_degree(
        &setup.boundary,
        DEFAULT_Q_MAX,
        default_tolerance(&setup.boundary),
    );
    let degrees: Vec<u32> = setup.background.degrees().collect();
    let mut relative_degrees = Vec::new();
    for (i, &a) in degrees.iter().enumerate() {
        for &b in &degrees[i + 1..] {
            relative_degrees.push(RelativeDegree {
                kind: RelativeKind::FieldField,
                a,
                b,
                degree: relative_symmetry_degree(RelativeKind::FieldField, a, b).ok(),
            });
        }
    }
    for m in setup.boundary.modes() {
        for &b in &degrees {
            relative_degrees.push(RelativeDegree {
                kind: RelativeKind::ShapeField,
                a: m.index,
                b,
                degree: relative_symmetry_degree(RelativeKind::ShapeField, m.index, b).ok(),
            });
        }
    }
    SymmetryOutput {
        boundary,
        background_symmetry_order: setup.background.max_symmetry_order(),
        relative_degrees,
    }
}
