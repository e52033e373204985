//! Closed-form perturbation theory for a disk of radius `r0` and its
//! `ε·r0·cos(nθ)` perturbations under harmonic-polynomial backgrounds.
//!
//! All fields are finite sums of `c·r^p·cos(mθ)` terms. A mode-by-mode disk
//! transmission solver ([`disk_transmission`]) rebuilds every field from its
//! boundary jumps and serves as an independent check of the printed formulas.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::background::{relative_symmetry_degree, HarmonicBackground, RelativeKind};
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Material and illumination parameters of the unperturbed disk problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskParams {
    /// Field amplitude `E`; the uniform background is `H = −E·x₁`.
    pub e: f64,
    pub r0: f64,
    pub eps_omega: f64,
    pub eps_2omega: f64,
    pub chi_perp: f64,
    pub chi_par: f64,
}

impl DiskParams {
    /// `E = r0 = 1`, `ε_ω = 2`, `ε_2ω = 3`, `χ⊥ = 1`, `χ∥ = 0`.
    pub const P1: DiskParams = DiskParams {
        e: 1.0,
        r0: 1.0,
        eps_omega: 2.0,
        eps_2omega: 3.0,
        chi_perp: 1.0,
        chi_par: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.e,
            self.r0,
            self.eps_omega,
            self.eps_2omega,
            self.chi_perp,
            self.chi_par,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "disk parameters must be finite".into(),
            ));
        }
        if self.r0 <= 0.0 {
            return Err(Error::NonpositiveRadius {
                min_radius: self.r0,
            });
        }
        Ok(())
    }

    fn require_omega(&self) -> Result<()> {
        self.validate()?;
        if self.eps_omega == -1.0 {
            return Err(Error::ResonantPermittivity {
                value: self.eps_omega,
            });
        }
        Ok(())
    }

    fn require_both(&self) -> Result<()> {
        self.require_omega()?;
        if self.eps_2omega == -1.0 {
            return Err(Error::ResonantPermittivity {
                value: self.eps_2omega,
            });
        }
        Ok(())
    }

    pub fn lambda_omega(&self) -> f64 {
        (self.eps_omega + 1.0) / (2.0 * (self.eps_omega - 1.0))
    }

    pub fn lambda_2omega(&self) -> f64 {
        (self.eps_2omega + 1.0) / (2.0 * (self.eps_2omega - 1.0))
    }

    /// Reflection contrast `(1 − ε_ω)/(1 + ε_ω)`.
    pub fn contrast(&self) -> f64 {
        (1.0 - self.eps_omega) / (1.0 + self.eps_omega)
    }

    /// `χ⊥ε_ω²ε_2ω + 2χ∥ε_ω`, the combination multiplying most exterior terms.
    fn radiating_strength(&self) -> f64 {
        self.chi_perp * self.eps_omega.powi(2) * self.eps_2omega
            + 2.0 * self.chi_par * self.eps_omega
    }
}

/// Finite cosine series `Σ c_k cos(kθ)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CosineSeries {
    coeffs: BTreeMap<u32, f64>,
}

impl CosineSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut s = Self::new();
        for (k, c) in terms {
            s.add(k, c);
        }
        s
    }

    pub fn add(&mut self, mode: u32, coeff: f64) {
        *self.coeffs.entry(mode).or_insert(0.0) += coeff;
    }

    pub fn coeff(&self, mode: u32) -> f64 {
        self.coeffs.get(&mode).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn mean(&self) -> f64 {
        self.coeff(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|&c| c == 0.0)
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        self.terms()
            .map(|(k, c)| c * (k as f64 * theta).cos())
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_terms(self.terms().map(|(k, c)| (k, c * s)))
    }
}

/// Cosine and sine series, closed under products and differentiation.
#[derive(Debug, Clone, Default)]
struct TrigSeries {
    cos: BTreeMap<u32, f64>,
    sin: BTreeMap<u32, f64>,
}

impl TrigSeries {
    fn add_cos(&mut self, k: i64, c: f64) {
        *self.cos.entry(k.unsigned_abs() as u32).or_insert(0.0) += c;
    }

    fn add_sin(&mut self, k: i64, c: f64) {
        if k != 0 {
            *self.sin.entry(k.unsigned_abs() as u32).or_insert(0.0) += c * k.signum() as f64;
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (&a, &ca) in &self.cos {
            let a = a as i64;
            for (&b, &cb) in &other.cos {
                let b = b as i64;
                out.add_cos(a - b, 0.5 * ca * cb);
                out.add_cos(a + b, 0.5 * ca * cb);
            }
            for (&b, &sb) in &other.sin {
                let b = b as i64;
                out.add_sin(a + b, 0.5 * ca * sb);
                out.add_sin(b - a, 0.5 * ca * sb);
            }
        }
        for (&a, &sa) in &self.sin {
            let a = a as i64;
            for (&b, &cb) in &other.cos {
                let b = b as i64;
                out.add_sin(a + b, 0.5 * sa * cb);
                out.add_sin(a - b, 0.5 * sa * cb);
            }
            for (&b, &sb) in &other.sin {
                let b = b as i64;
                out.add_cos(a - b, 0.5 * sa * sb);
                out.add_cos(a + b, -0.5 * sa * sb);
            }
        }
        out
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            cos: self.cos.iter().map(|(&k, &c)| (k, c * s)).collect(),
            sin: self.sin.iter().map(|(&k, &c)| (k, c * s)).collect(),
        }
    }

    fn derivative(&self) -> Self {
        let mut out = Self::default();
        for (&k, &c) in &self.cos {
            out.add_sin(k as i64, -(k as f64) * c);
        }
        for (&k, &c) in &self.sin {
            out.add_cos(k as i64, k as f64 * c);
        }
        out
    }

    fn into_cosine(self) -> CosineSeries {
        debug_assert!(self.sin.values().all(|c| *c == 0.0));
        CosineSeries::from_terms(self.cos)
    }
}

/// One term `coeff·r^power·cos(mode·θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldTerm {
    pub mode: u32,
    pub power: i32,
    pub coeff: f64,
}

impl FieldTerm {
    /// `r^p cos(mθ)` is harmonic iff `p = ±m`, or `m = p = 0`.
    pub fn is_harmonic(&self) -> bool {
        self.power.unsigned_abs() == self.mode
    }

    fn eval(&self, r: f64, theta: f64) -> f64 {
        self.coeff * r.powi(self.power) * (self.mode as f64 * theta).cos()
    }
}

/// Piecewise field: `interior` terms for `r < r0`, `exterior` terms otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticField {
    pub r0: f64,
    pub interior: Vec<FieldTerm>,
    pub exterior: Vec<FieldTerm>,
}

fn push_term(terms: &mut Vec<FieldTerm>, mode: u32, power: i32, coeff: f64) {
    match terms
        .iter_mut()
        .find(|t| t.mode == mode && t.power == power)
    {
        Some(t) => t.coeff += coeff,
        None => {
            terms.push(FieldTerm { mode, power, coeff });
            terms.sort_by_key(|t| (t.mode, t.power));
        }
    }
}

impl AnalyticField {
    pub fn new(r0: f64) -> Self {
        Self {
            r0,
            interior: Vec::new(),
            exterior: Vec::new(),
        }
    }

    pub fn push_interior(&mut self, mode: u32, power: i32, coeff: f64) {
        push_term(&mut self.interior, mode, power, coeff);
    }

    pub fn push_exterior(&mut self, mode: u32, power: i32, coeff: f64) {
        push_term(&mut self.exterior, mode, power, coeff);
    }

    pub fn evaluate(&self, p: &Point) -> f64 {
        let r = p.norm();
        let theta = p.y.atan2(p.x);
        let terms = if r < self.r0 {
            &self.interior
        } else {
            &self.exterior
        };
        terms.iter().map(|t| t.eval(r, theta)).sum()
    }

    /// Coefficient of the decaying exterior term `r^{−m} cos(mθ)`.
    pub fn exterior_coefficient(&self, mode: u32) -> f64 {
        self.exterior
            .iter()
            .filter(|t| t.mode == mode && t.power == -(mode as i32) && mode > 0)
            .map(|t| t.coeff)
            .sum()
    }

    /// Decaying exterior modes with nonzero coefficient, ascending.
    pub fn radiating_modes(&self) -> Vec<u32> {
        let mut modes: Vec<u32> = self
            .exterior
            .iter()
            .filter(|t| t.power < 0 && t.coeff != 0.0)
            .map(|t| t.mode)
            .collect();
        modes.dedup();
        modes
    }

    pub fn is_harmonic(&self) -> bool {
        self.interior
            .iter()
            .chain(&self.exterior)
            .all(FieldTerm::is_harmonic)
    }

    /// `self + s·other`, merging equal `(mode, power)` terms.
    pub fn plus_scaled(&self, other: &Self, s: f64) -> Self {
        let mut out = self.clone();
        for t in &other.interior {
            out.push_interior(t.mode, t.power, s * t.coeff);
        }
        for t in &other.exterior {
            out.push_exterior(t.mode, t.power, s * t.coeff);
        }
        out
    }
}

fn check_degree(ell: u32) -> Result<()> {
    if ell == 0 {
        return Err(Error::InvalidParameter(
            "background degree must be >= 1".into(),
        ));
    }
    Ok(())
}

fn check_shape_regime(n: u32, ell: u32) -> Result<()> {
    check_degree(ell)?;
    if n < 3 {
        return Err(Error::UnsupportedRegime(format!(
            "shape mode n = {n}; the perturbation theory covers n >= 3"
        )));
    }
    if ell >= 2 && n <= ell {
        return Err(Error::UnsupportedRegime(format!(
            "n = {n} <= ℓ = {ell}: the first-order interior field carries no second harmonic"
        )));
    }
    Ok(())
}

/// Leading-order linear field on the disk for `H = −E r^ℓ cos ℓθ`.
pub fn linear_leading(p: &DiskParams, ell: u32) -> Result<AnalyticField> {
    check_degree(ell)?;
    p.require_omega()?;
    let l = ell as i32;
    let mut f = AnalyticField::new(p.r0);
    f.push_interior(ell, l, -p.e * 2.0 / (1.0 + p.eps_omega));
    f.push_exterior(ell, l, -p.e);
    f.push_exterior(ell, -l, -p.e * p.contrast() * p.r0.powi(2 * l));
    Ok(f)
}

/// Leading-order `(P⊥, σ^s)` on the disk for `H = −E r^ℓ cos ℓθ`.
pub fn surface_sources_leading(p: &DiskParams, ell: u32) -> Result<(CosineSeries, CosineSeries)> {
    check_degree(ell)?;
    p.require_omega()?;
    let l = ell as f64;
    let eo = p.eps_omega;
    let pp = 2.0
        * p.chi_perp
        * p.e.powi(2)
        * (eo / (1.0 + eo)).powi(2)
        * l
        * l
        * p.r0.powi(2 * ell as i32 - 2);
    let sig = 8.0 * p.chi_par * p.e.powi(2) * eo * l.powi(3) * p.r0.powi(2 * ell as i32 - 3)
        / (1.0 + eo).powi(2);
    Ok((
        CosineSeries::from_terms([(0, pp), (2 * ell, pp)]),
        CosineSeries::from_terms([(2 * ell, sig)]),
    ))
}

/// `(P⊥, σ^s)` on the disk for an arbitrary background, obtained by expanding
/// the products of interior traces exactly.
pub fn disk_surface_sources(
    p: &DiskParams,
    h: &HarmonicBackground,
) -> Result<(CosineSeries, CosineSeries)> {
    p.require_omega()?;
    let eo = p.eps_omega;
    // ∂_r u|₋ = Σ α_k cos kθ and ∂_T u|₋ = −Σ α_k sin kθ
    let mut dn = TrigSeries::default();
    let mut dt = TrigSeries::default();
    for t in h.terms() {
        let k = t.degree as i64;
        let alpha = 2.0 * t.coeff * k as f64 * p.r0.powi(t.degree as i32 - 1) / (1.0 + eo);
        dn.add_cos(k, alpha);
        dt.add_sin(k, -alpha);
    }
    let p_perp = dn.mul(&dn).scaled(p.chi_perp * eo * eo);
    let p_par = dn.mul(&dt).scaled(2.0 * p.chi_par * eo);
    let sigma = p_par.derivative().scaled(-1.0 / p.r0);
    Ok((p_perp.into_cosine(), sigma.into_cosine()))
}

/// Solves the disk transmission problem mode by mode:
/// `u₊ − u₋ = jump` and `∂_r u₊ − ε_2ω ∂_r u₋ = flux` on `r = r0`, with
/// `u = Σ a_k r^k cos kθ` inside and `Σ b_k r^{−k} cos kθ` outside.
pub fn disk_transmission(
    r0: f64,
    eps_2omega: f64,
    jump: &CosineSeries,
    flux: &CosineSeries,
) -> Result<AnalyticField> {
    if eps_2omega == -1.0 {
        return Err(Error::ResonantPermittivity { value: eps_2omega });
    }
    let scale = flux.max_abs_coeff().max(jump.max_abs_coeff() / r0);
    if flux.mean().abs() > 1e-12 * scale {
        return Err(Error::MeanZeroViolation {
            relative_mean: flux.mean().abs() / scale,
        });
    }
    let mut f = AnalyticField::new(r0);
    if jump.mean() != 0.0 {
        f.push_interior(0, 0, -jump.mean());
    }
    let modes: std::collections::BTreeSet<u32> = jump
        .terms()
        .chain(flux.terms())
        .map(|(k, _)| k)
        .filter(|&k| k > 0)
        .collect();
    for k in modes {
        let (j, fl) = (jump.coeff(k), flux.coeff(k));
        let kf = k as f64;
        let a = -(fl + kf * j / r0) / (kf * r0.powi(k as i32 - 1) * (1.0 + eps_2omega));
        let b = r0.powi(k as i32) * (j + a * r0.powi(k as i32));
        f.push_interior(k, k as i32, a);
        f.push_exterior(k, -(k as i32), b);
    }
    Ok(f)
}

/// Second-harmonic field of the disk driven by `P⊥` and `σ^s`, with an
/// optional bulk termination charge `σ^b` added to the flux jump.
pub fn sh_from_disk_sources(
    p: &DiskParams,
    p_perp: &CosineSeries,
    sigma_s: &CosineSeries,
    sigma_b: Option<&CosineSeries>,
) -> Result<AnalyticField> {
    p.require_both()?;
    let jump = p_perp.scaled(4.0 * PI);
    let mut flux = sigma_s.scaled(-4.0 * PI);
    if let Some(sb) = sigma_b {
        for (k, c) in sb.terms() {
            flux.add(k, -4.0 * PI * c);
        }
    }
    disk_transmission(p.r0, p.eps_2omega, &jump, &flux)
}

/// Leading-order second-harmonic field of the disk for `H = −E r^ℓ cos ℓθ`.
pub fn sh_leading(p: &DiskParams, ell: u32) -> Result<AnalyticField> {
    check_degree(ell)?;
    p.require_both()?;
    let (eo, e2) = (p.eps_omega, p.eps_2omega);
    let l = ell as f64;
    let li = ell as i32;
    let k = 8.0 * PI * p.e.powi(2) * l * l / ((1.0 + eo).powi(2) * (1.0 + e2));
    let mut f = AnalyticField::new(p.r0);
    let constant = -p.chi_perp * eo * eo * 8.0 * PI * p.e.powi(2) * l * l / (1.0 + eo).powi(2)
        * p.r0.powi(2 * li - 2);
    f.push_interior(0, 0, constant);
    f.push_interior(
        2 * ell,
        2 * li,
        -(p.chi_perp * eo * eo - 2.0 * p.chi_par * eo) * k / (p.r0 * p.r0),
    );
    f.push_exterior(
        2 * ell,
        -2 * li,
        p.radiating_strength() * k * p.r0.powi(4 * li - 2),
    );
    Ok(f)
}

/// First-order linear field for `f = r0 cos nθ` and `H = −E r^ℓ cos ℓθ`.
pub fn linear_first_order(p: &DiskParams, n: u32, ell: u32) -> Result<AnalyticField> {
    check_shape_regime(n, ell)?;
    p.require_omega()?;
    let g = p.contrast();
    let l = ell as f64;
    let (lo, hi) = (n - ell, n + ell);
    let mut f = AnalyticField::new(p.r0);
    f.push_interior(
        lo,
        lo as i32,
        2.0 * p.e * l * g / (1.0 + p.eps_omega) * p.r0.powi(2 * ell as i32 - n as i32),
    );
    f.push_exterior(lo, -(lo as i32), p.e * l * g * g * p.r0.powi(n as i32));
    f.push_exterior(
        hi,
        -(hi as i32),
        -p.e * l * g * p.r0.powi((n + 2 * ell) as i32),
    );
    Ok(f)
}

/// Boundary data `I₁..I₄` of the first-order coupled transmission problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderBoundaryData {
    pub i1: CosineSeries,
    pub i2: CosineSeries,
    pub i3: CosineSeries,
    pub i4: CosineSeries,
}

/// `I₁..I₄` for `f = amplitude·r0·cos nθ` and `H = −E r^ℓ cos ℓθ`. The
/// `cos((n−2ℓ)θ)` terms are stored under mode `|n−2ℓ|`.
pub fn boundary_data_first_order(
    p: &DiskParams,
    n: u32,
    ell: u32,
    amplitude: f64,
) -> Result<FirstOrderBoundaryData> {
    check_shape_regime(n, ell)?;
    if n == 2 * ell {
        return Err(Error::UnsupportedRegime(format!("n = 2ℓ = {n}")));
    }
    p.require_both()?;
    let (eo, e2, cp, cq) = (p.eps_omega, p.eps_2omega, p.chi_perp, p.chi_par);
    let (nf, l) = (n as f64, ell as f64);
    let g = p.contrast();
    let e = p.e;
    let r0 = p.r0;
    let li = ell as i32;
    let low = n.abs_diff(2 * ell);

    let c1 = -e * g * l * r0.powi(li) * amplitude;
    let i1 = CosineSeries::from_terms([(n - ell, c1), (n + ell, c1)]);
    let c2 = -e * g * l * r0.powi(li - 1) * amplitude;
    let i2 = CosineSeries::from_terms([(n - ell, c2 * (nf - l)), (n + ell, -c2 * (nf + l))]);

    let a = 8.0 * PI * e * e * l * l * r0.powi(2 * li - 2) / (1.0 + eo).powi(2) * amplitude;
    let shared3 = eo / (1.0 + e2) * l * (cp * eo * (e2 - 1.0) + 4.0 * cq);
    let i3 = CosineSeries::from_terms([
        (
            low,
            a * (shared3 - (2.0 * g * (nf - l) + (nf - l + 1.0)) * cp * eo * eo),
        ),
        (
            n,
            -a * (2.0 * g * (nf - l) - 2.0 * (l - 1.0)) * cp * eo * eo,
        ),
        (n + 2 * ell, a * (shared3 + (nf + l - 1.0) * cp * eo * eo)),
    ]);

    let b = 16.0 * PI * e * e * l * l * r0.powi(2 * li - 3) / (1.0 + eo).powi(2) * amplitude;
    let shared4 = eo / (1.0 + e2) * l * (cp * eo * e2 - cq * e2 + cq);
    let i4 = CosineSeries::from_terms([
        (
            low,
            b * (shared4 - (nf - l + 1.0) * cq * eo) * (nf - 2.0 * l),
        ),
        (n, b * 2.0 * g * (nf - l) * cq * eo * nf),
        (
            n + 2 * ell,
            -b * (shared4 + (nf + l - 1.0) * cq * eo) * (nf + 2.0 * l),
        ),
    ]);
    Ok(FirstOrderBoundaryData { i1, i2, i3, i4 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeAmplitude {
    pub mode: u32,
    pub amplitude: f64,
}

/// First-order exterior amplitudes `M_m` of `u_2ω⁽¹⁾ = Σ M_m r^{−m} cos(mθ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SHFirstOrderCoeffs {
    pub n: u32,
    pub ell: u32,
    /// Modes `|n−2ℓ|`, `n`, `n+2ℓ`, in that order.
    pub entries: Vec<ModeAmplitude>,
}

impl SHFirstOrderCoeffs {
    pub fn lowest_mode(&self) -> u32 {
        self.entries[0].mode
    }

    pub fn amplitude(&self, mode: u32) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.mode == mode)
            .map(|e| e.amplitude)
            .sum()
    }

    /// Predicted far-field decay exponent of the first-order field.
    pub fn predicted_decay(&self) -> f64 {
        -(self.lowest_mode() as f64)
    }

    pub fn exterior_field(&self, r0: f64) -> AnalyticField {
        let mut f = AnalyticField::new(r0);
        for e in &self.entries {
            f.push_exterior(e.mode, -(e.mode as i32), e.amplitude);
        }
        f
    }
}

fn coeffs(n: u32, ell: u32, low: f64, mid: f64, high: f64) -> SHFirstOrderCoeffs {
    SHFirstOrderCoeffs {
        n,
        ell,
        entries: vec![
            ModeAmplitude {
                mode: n.abs_diff(2 * ell),
                amplitude: low,
            },
            ModeAmplitude {
                mode: n,
                amplitude: mid,
            },
            ModeAmplitude {
                mode: n + 2 * ell,
                amplitude: high,
            },
        ],
    }
}

/// First-order second-harmonic amplitudes for `f = r0 cos nθ`. The uniform
/// case `ℓ = 1` uses its dedicated closed form; `ℓ >= 2` uses the general one.
pub fn sh_first_order(p: &DiskParams, n: u32, ell: u32) -> Result<SHFirstOrderCoeffs> {
    if ell == 1 {
        check_shape_regime(n, ell)?;
        p.require_both()?;
        let (eo, e2) = (p.eps_omega, p.eps_2omega);
        let nf = n as f64;
        let ni = n as i32;
        let pre = 8.0 * PI * p.e.powi(2) / ((1.0 + e2) * (1.0 + eo).powi(2));
        let a = p.chi_perp * eo * eo * e2;
        let low = pre
            * ((e2 - 3.0) / (1.0 + e2) * a
                + ((nf - 2.0) * eo - (3.0 * nf - 2.0)) / (1.0 + eo) * a
                + 2.0 * ((nf - 1.0) + (nf + 3.0) * e2) / (1.0 + e2) * p.chi_par * eo)
            * p.r0.powi(ni - 2);
        let mid = 2.0
            * pre
            * ((eo - 1.0) / (1.0 + eo) * (nf - 1.0) * p.radiating_strength())
            * p.r0.powi(ni);
        let high = pre * (nf + 1.0) * p.radiating_strength() * p.r0.powi(ni + 2);
        Ok(coeffs(n, 1, low, mid, high))
    } else {
        sh_first_order_general(p, n, ell)
    }
}

/// The general-`ℓ` closed form, covering both `n > 2ℓ` and `n < 2ℓ`.
pub fn sh_first_order_general(p: &DiskParams, n: u32, ell: u32) -> Result<SHFirstOrderCoeffs> {
    check_shape_regime(n, ell)?;
    if n == 2 * ell {
        return Err(Error::UnsupportedRegime(format!(
            "n = 2ℓ = {n}: relative symmetry degree is zero"
        )));
    }
    p.require_both()?;
    let (eo, e2, cq) = (p.eps_omega, p.eps_2omega, p.chi_par);
    let (nf, l) = (n as f64, ell as f64);
    let (ni, li) = (n as i32, ell as i32);
    let pre =
        8.0 * PI * p.e.powi(2) * l * l * p.r0.powi(2 * li - 2) / ((1.0 + e2) * (1.0 + eo).powi(2));
    let a = p.chi_perp * eo * eo * e2;
    let s = p.radiating_strength();
    let shared = ((nf - l - 1.0) * eo - (3.0 * nf - 3.0 * l + 1.0)) / (1.0 + eo) * a;
    let low = if n > 2 * ell {
        pre * (l * (e2 - 3.0) / (1.0 + e2) * a
            + shared
            + 2.0 * ((nf - 2.0 * l + 1.0) + (nf + 2.0 * l + 1.0) * e2) / (1.0 + e2) * cq * eo)
            * p.r0.powi(ni - 2 * li)
    } else {
        pre * (l * a + shared - 2.0 * (nf - 2.0 * l + 1.0) * cq * eo) * p.r0.powi(2 * li - ni)
    };
    let mid = 2.0 * pre * ((l - 1.0) * a - p.contrast() * (nf - l) * s) * p.r0.powi(ni);
    let high = pre * (nf + 2.0 * l - 1.0) * s * p.r0.powi(ni + 2 * li);
    Ok(coeffs(n, ell, low, mid, high))
}

/// First-order amplitudes recovered by solving the disk transmission problem
/// with jumps `I₃` and `I₄`.
pub fn sh_first_order_from_boundary_data(
    p: &DiskParams,
    n: u32,
    ell: u32,
) -> Result<SHFirstOrderCoeffs> {
    let data = boundary_data_first_order(p, n, ell, 1.0)?;
    let field = disk_transmission(p.r0, p.eps_2omega, &data.i3, &data.i4)?;
    let low = n.abs_diff(2 * ell);
    Ok(coeffs(
        n,
        ell,
        field.exterior_coefficient(low),
        field.exterior_coefficient(n),
        field.exterior_coefficient(n + 2 * ell),
    ))
}

/// Second-harmonic field of the disk under `H = −E(r^m cos mθ + r^ℓ cos ℓθ)`.
/// The exterior uses the closed form; the interior follows from the jumps.
pub fn sh_two_term(p: &DiskParams, m: u32, ell: u32) -> Result<AnalyticField> {
    check_degree(m)?;
    check_degree(ell)?;
    let d = relative_symmetry_degree(RelativeKind::FieldField, m, ell)?;
    p.require_both()?;
    let (eo, e2) = (p.eps_omega, p.eps_2omega);
    let (mf, l) = (m as f64, ell as f64);
    let (mi, li, di) = (m as i32, ell as i32, d as i32);
    let r0 = p.r0;
    let denom = (1.0 + eo).powi(2) * (1.0 + e2);
    let k = p.radiating_strength() * 8.0 * PI * p.e.powi(2) / denom;
    let mut exterior = CosineSeries::new();
    exterior.add(2 * m, k * mf * mf * r0.powi(4 * mi - 2));
    exterior.add(2 * ell, k * l * l * r0.powi(4 * li - 2));
    exterior.add(m + ell, k * 2.0 * mf * l * r0.powi(2 * (mi + li - 1)));
    exterior.add(
        d,
        p.chi_perp * eo * eo * e2 * 16.0 * PI * p.e.powi(2) * mf * l / denom
            * r0.powi(di + mi + li - 2),
    );

    let h = HarmonicBackground::two_term(m, ell, p.e)?;
    let (p_perp, _) = disk_surface_sources(p, &h)?;
    let jump = p_perp.scaled(4.0 * PI);
    let mut f = AnalyticField::new(r0);
    if jump.mean() != 0.0 {
        f.push_interior(0, 0, -jump.mean());
    }
    for (mode, b) in exterior.terms() {
        let mi = mode as i32;
        f.push_exterior(mode, -mi, b);
        f.push_interior(
            mode,
            mi,
            (b * r0.powi(-mi) - jump.coeff(mode)) / r0.powi(mi),
        );
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadiationCase {
    /// Unperturbed disk under `H = −E r^ℓ cos ℓθ` (`ℓ = 1`: uniform field).
    Disk { ell: u32 },
    /// `f = r0 cos nθ` under `H = −E r^ℓ cos ℓθ`.
    Shape { n: u32, ell: u32 },
    /// Unperturbed disk under `H = −E(r^m cos mθ + r^ℓ cos ℓθ)`.
    TwoTerm { m: u32, ell: u32 },
}

/// Blow-up powers `k` in `O((1+ε)^{−k})` of the lowest-mode amplitude.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonanceExponents {
    pub omega: u32,
    pub two_omega: u32,
    /// Total power along the diagonal `ε_ω = ε_2ω`.
    pub both: u32,
    /// Candidate `(ω, 2ω)` power pairs for simultaneous resonance.
    pub both_branches: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiationPrediction {
    pub lowest_mode: u32,
    pub exponents: ResonanceExponents,
}

pub fn predict_radiation(case: RadiationCase) -> Result<RadiationPrediction> {
    let disk_like = ResonanceExponents {
        omega: 2,
        two_omega: 1,
        both: 3,
        both_branches: vec![(2, 1)],
    };
    match case {
        RadiationCase::Disk { ell } => {
            check_degree(ell)?;
            Ok(RadiationPrediction {
                lowest_mode: 2 * ell,
                exponents: disk_like,
            })
        }
        RadiationCase::TwoTerm { m, ell } => {
            check_degree(m)?;
            check_degree(ell)?;
            Ok(RadiationPrediction {
                lowest_mode: relative_symmetry_degree(RelativeKind::FieldField, m, ell)?,
                exponents: disk_like,
            })
        }
        RadiationCase::Shape { n, ell } => {
            check_shape_regime(n, ell)?;
            Ok(RadiationPrediction {
                lowest_mode: relative_symmetry_degree(RelativeKind::ShapeField, n, ell)?,
                exponents: ResonanceExponents {
                    omega: 3,
                    two_omega: 2,
                    both: 4,
                    both_branches: vec![(2, 2), (3, 1)],
                },
            })
        }
    }
}
