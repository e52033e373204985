//! Quasi-static second-harmonic generation from two-dimensional plasmonic
//! cross-sections.
//!
//! The crate pairs closed-form perturbation theory for a disk with a
//! `cos(nθ)` boundary perturbation ([`analytic`]) with a Nyström
//! boundary-integral solver for arbitrary smooth star-shaped boundaries
//! ([`potentials`], [`solver`]). [`analysis`] extracts far-field multipole
//! spectra and plasmon-resonance orders from either path.

pub mod analysis;
pub mod analytic;
pub mod background;
pub mod error;
pub mod geometry;
pub mod potentials;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
