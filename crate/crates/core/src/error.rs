use thiserror::Error;

/// Errors produced by the representation, phase and oracle routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spin j = {0} is not a positive half-integer")]
    InvalidSpin(f64),
    #[error("Bargmann index k = {0} must be positive")]
    InvalidBargmannIndex(f64),
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("weight mu = {mu} is not admissible for spin j = {j}")]
    InvalidWeight { j: f64, mu: f64 },
    #[error("matrix exponential did not converge (norm {norm:e})")]
    ExpNotConverged { norm: f64 },
    #[error("no exact diagonalization: c0^2 - 4|c1|^2 = {discriminant:e} is not positive")]
    NoExactDiagonalization { discriminant: f64 },
    #[error("tan(tau/2) pole at tau = {0}")]
    TanPole(f64),
    #[error("coherent-state series did not converge (tail {tail:e})")]
    SeriesNotConverged { tail: f64 },
    #[error("auxiliary equations singular at t = {t}: theta crossed zero with coupling {coupling:e}")]
    AuxiliarySingularity { t: f64, coupling: f64 },
    #[error("no adiabatic fixed point at t = {t}: c0 = {c0}, lambda = {lambda}")]
    NoAdiabaticFixedPoint { t: f64, c0: f64, lambda: f64 },
    #[error("hyperbolic regime violated: (w2+w3)^2 - 4 lambda^2 n_a = {discriminant:e}")]
    HyperbolicSingularity { discriminant: f64 },
    #[error("sector (s_ab = {s_ab}, s_ac = {s_ac}) is empty within the truncation")]
    EmptySector { s_ab: usize, s_ac: usize },
    #[error("step too large: dt * |H psi| = {product:e} exceeds {limit}")]
    StepTooLarge { product: f64, limit: f64 },
    #[error("tracking lost at t = {t}: overlap {overlap:e} with reference state")]
    TrackingLost { t: f64, overlap: f64 },
    #[error("phase samples too coarse: {per_period:.1} samples per dynamical period (need {required})")]
    SamplingTooCoarse { per_period: f64, required: f64 },
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),
    #[error("non-Hermitian input: {0}")]
    NonHermitian(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl Error {
    /// Variant name, for reports that tag failures by kind.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidSpin(_) => "InvalidSpin",
            Error::InvalidBargmannIndex(_) => "InvalidBargmannIndex",
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::InvalidWeight { .. } => "InvalidWeight",
            Error::ExpNotConverged { .. } => "ExpNotConverged",
            Error::NoExactDiagonalization { .. } => "NoExactDiagonalization",
            Error::TanPole(_) => "TanPole",
            Error::SeriesNotConverged { .. } => "SeriesNotConverged",
            Error::AuxiliarySingularity { .. } => "AuxiliarySingularity",
            Error::NoAdiabaticFixedPoint { .. } => "NoAdiabaticFixedPoint",
            Error::HyperbolicSingularity { .. } => "HyperbolicSingularity",
            Error::EmptySector { .. } => "EmptySector",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::TrackingLost { .. } => "TrackingLost",
            Error::SamplingTooCoarse { .. } => "SamplingTooCoarse",
            Error::InvalidProtocol(_) => "InvalidProtocol",
            Error::NonHermitian(_) => "NonHermitian",
            Error::DimensionMismatch(_) => "DimensionMismatch",
        }
    }

    /// True for errors caused by the inputs rather than by a numerical
    /// breakdown along the way.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpin(_)
                | Error::InvalidBargmannIndex(_)
                | Error::InvalidDimension(_)
                | Error::InvalidWeight { .. }
                | Error::NoExactDiagonalization { .. }
                | Error::TanPole(_)
                | Error::NoAdiabaticFixedPoint { .. }
                | Error::HyperbolicSingularity { .. }
                | Error::EmptySector { .. }
                | Error::InvalidProtocol(_)
                | Error::NonHermitian(_)
                | Error::DimensionMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
