use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("boundary radius is not positive (min r = {min_radius:e})")]
    NonpositiveRadius { min_radius: f64 },

    #[error("invalid shape mode index {index}: indices start at 1")]
    InvalidMode { index: u32 },

    #[error("invalid grid size {n}: need an even node count >= {min}")]
    InvalidGrid { n: usize, min: usize },

    #[error("invalid background: {0}")]
    InvalidBackground(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("relative symmetry degree is zero ({0})")]
    DegenerateRelativeSymmetry(String),

    #[error("permittivity {value} sits exactly on the plasmon resonance -1")]
    ResonantPermittivity { value: f64 },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("grid nodes {i} and {j} coincide")]
    SingularGrid { i: usize, j: usize },

    #[error("density not resolved by the grid (spectral tail ratio {tail_ratio:e})")]
    ResolutionLoss { tail_ratio: f64 },

    #[error("evaluation point ({x}, {y}) lies within one grid spacing of the boundary")]
    TooCloseToBoundary { x: f64, y: f64 },

    #[error("second-kind system is near singular (condition number {condition_number:e})")]
    NearSingularSystem { condition_number: f64 },

    #[error("right-hand side is not mean-zero (relative mean {relative_mean:e})")]
    MeanZeroViolation { relative_mean: f64 },

    #[error("multipole spectrum is empty")]
    EmptySpectrum,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable kebab-case identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonpositiveRadius { .. } => "nonpositive-radius",
            Error::InvalidMode { .. } => "invalid-mode",
            Error::InvalidGrid { .. } => "invalid-grid",
            Error::InvalidBackground(_) => "invalid-background",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::DegenerateRelativeSymmetry(_) => "degenerate-relative-symmetry",
            Error::ResonantPermittivity { .. } => "resonant-permittivity",
            Error::UnsupportedRegime(_) => "unsupported-regime",
            Error::SingularGrid { .. } => "singular-grid",
            Error::ResolutionLoss { .. } => "resolution-loss",
            Error::TooCloseToBoundary { .. } => "too-close-to-boundary",
            Error::NearSingularSystem { .. } => "near-singular-system",
            Error::MeanZeroViolation { .. } => "mean-zero-violation",
            Error::EmptySpectrum => "empty-spectrum",
            Error::DegenerateFit(_) => "degenerate-fit",
        }
    }

    /// True for rejected inputs, false for failures met during computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NonpositiveRadius { .. }
                | Error::InvalidMode { .. }
                | Error::InvalidGrid { .. }
                | Error::InvalidBackground(_)
                | Error::InvalidParameter(_)
                | Error::DegenerateRelativeSymmetry(_)
                | Error::ResonantPermittivity { .. }
                | Error::UnsupportedRegime(_)
        )
    }
}
