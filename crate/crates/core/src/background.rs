//! Harmonic-polynomial background potentials `H = Σ C_ℓ Re(z^ℓ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub degree: u32,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicBackground {
    terms: Vec<HarmonicTerm>,
}

impl HarmonicBackground {
    /// Terms are sorted by degree. Degrees must be distinct and `>= 1`.
    pub fn new(terms: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut terms: Vec<HarmonicTerm> = terms
            .into_iter()
            .map(|(degree, coeff)| HarmonicTerm { degree, coeff })
            .collect();
        if terms.is_empty() {
            return Err(Error::InvalidBackground(
                "at least one term is required".into(),
            ));
        }
        terms.sort_by_key(|t| t.degree);
        for t in &terms {
            if t.degree == 0 {
                return Err(Error::InvalidBackground("term degrees start at 1".into()));
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidBackground(format!(
                    "degree {} has a non-finite coefficient",
                    t.degree
                )));
            }
        }
        if let Some(w) = terms.windows(2).find(|w| w[0].degree == w[1].degree) {
            return Err(Error::InvalidBackground(format!(
                "degree {} appears more than once",
                w[0].degree
            )));
        }
        Ok(Self { terms })
    }

    /// `H = −E·x₁`.
    pub fn uniform(e: f64) -> Self {
        Self::single(1, e)
    }

    /// `H = −E·r^ℓ cos ℓθ`.
    pub fn single(ell: u32, e: f64) -> Self {
        Self::new([(ell, -e)]).expect("single-term background with ℓ >= 1")
    }

    /// `H = −E·(r^m cos mθ + r^ℓ cos ℓθ)`.
    pub fn two_term(m: u32, ell: u32, e: f64) -> Result<Self> {
        Self::new([(m, -e), (ell, -e)])
    }

    pub fn terms(&self) -> &[HarmonicTerm] {
        &self.terms
    }

    pub fn degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.iter().map(|t| t.degree)
    }

    /// Largest coefficient magnitude.
    pub fn scale(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.coeff.abs()))
    }

    pub fn evaluate(&self, p: &Point) -> f64 {
        let z = Complex64::new(p.x, p.y);
        self.terms
            .iter()
            .map(|t| t.coeff * z.powu(t.degree).re)
            .sum()
    }

    /// `∇ Re(C z^ℓ) = (Re(ℓC z^{ℓ−1}), −Im(ℓC z^{ℓ−1}))`.
    pub fn gradient(&self, p: &Point) -> Point {
        let z = Complex64::new(p.x, p.y);
        let dz: Complex64 = self
            .terms
            .iter()
            .map(|t| t.coeff * t.degree as f64 * z.powu(t.degree - 1))
            .sum();
        Point::new(dz.re, -dz.im)
    }

    pub fn normal_derivative(&self, p: &Point, normal: &Point) -> f64 {
        self.gradient(p).dot(normal)
    }

    /// True iff `q` divides every term degree, i.e. `H` is `D_q`-invariant.
    pub fn symmetry_order(&self, q: u32) -> bool {
        assert!(q >= 1, "group order must be >= 1");
        self.terms.iter().all(|t| t.degree % q == 0)
    }

    /// Largest `q` with `D_q` invariance: the gcd of the degrees.
    pub fn max_symmetry_order(&self) -> u32 {
        self.degrees().fold(0, gcd)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelativeKind {
    /// Two background harmonics of degrees `m` and `ℓ`: `|m − ℓ|`.
    FieldField,
    /// Shape mode `n` against background degree `ℓ`: `|n − 2ℓ|`.
    ShapeField,
}

pub fn relative_symmetry_degree(kind: RelativeKind, a: u32, b: u32) -> Result<u32> {
    let (x, y) = match kind {
        RelativeKind::FieldField => (a as i64, b as i64),
        RelativeKind::ShapeField => (a as i64, 2 * b as i64),
    };
    let d = (x - y).unsigned_abs() as u32;
    if d == 0 {
        return Err(Error::DegenerateRelativeSymmetry(match kind {
            RelativeKind::FieldField => format!("m = ℓ = {a}"),
            RelativeKind::ShapeField => format!("n = 2ℓ = {a}"),
        }));
    }
    Ok(d)
}
