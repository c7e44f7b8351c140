use thiserror::Error;

/// Every failure the library reports.
///
/// Variants split into configuration problems (bad input documents or
/// arguments) and numerical failures; [`Error::is_config`] tells them apart.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("reality violation: {0}")]
    RealityViolation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("not a saddle: {0}")]
    NotASaddle(String),
    #[error("energy mismatch: H(from) = {from}, H(to) = {to}")]
    EnergyMismatch { from: f64, to: f64 },
    #[error("no connection: {0}")]
    NoConnection(String),
    #[error("lost hyperbolicity: {0}")]
    LostHyperbolicity(String),
    #[error("quadrature tolerance not met: requested {requested:e}, estimated {estimated:e}")]
    ToleranceNotMet { requested: f64, estimated: f64 },
    #[error("series is not single-harmonic (harmonic {0} is nonzero)")]
    MultiHarmonic(i32),
    #[error("Melnikov series is constant")]
    ConstantSeries,
    #[error("degenerate Hessian at saddle {0:?}: both diagonal second derivatives vanish")]
    DegenerateHessian([f64; 2]),
    #[error("requested time {t} lies across a zero of the reduction coordinate (branch boundary {boundary})")]
    PoleCrossing { t: f64, boundary: f64 },
    #[error("ill-conditioned connection: condition number {0:e}")]
    IllConditioned(f64),
    #[error("pole on continuation path near t = {0}")]
    PoleOnPath(String),
    #[error("integrator step failure: {0}")]
    StepFailure(String),
    #[error("orbit has no closed form; complex continuation needs a preset orbit")]
    NotClosedForm,
    #[error("trajectory escaped the bounding box at {0:?}")]
    Escape([f64; 2]),
    #[error("manifold refinement exhausted: {0}")]
    FoldTooSharp(String),
}

impl Error {
    /// True for errors caused by the problem statement rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Schema(_)
                | Error::UnknownPreset(_)
                | Error::RealityViolation(_)
                | Error::InvalidArgument(_)
                | Error::NotASaddle(_)
                | Error::EnergyMismatch { .. }
                | Error::NotClosedForm
                | Error::ConstantSeries
                | Error::MultiHarmonic(_)
        )
    }

    /// Short machine-readable kind name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Schema(_) => "schema",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::RealityViolation(_) => "reality_violation",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NoConvergence(_) => "no_convergence",
            Error::NotASaddle(_) => "not_a_saddle",
            Error::EnergyMismatch { .. } => "energy_mismatch",
            Error::NoConnection(_) => "no_connection",
            Error::LostHyperbolicity(_) => "lost_hyperbolicity",
            Error::ToleranceNotMet { .. } => "tolerance_not_met",
            Error::MultiHarmonic(_) => "multi_harmonic",
            Error::ConstantSeries => "constant_series",
            Error::DegenerateHessian(_) => "degenerate_hessian",
            Error::PoleCrossing { .. } => "pole_crossing",
            Error::IllConditioned(_) => "ill_conditioned",
            Error::PoleOnPath(_) => "pole_on_path",
            Error::StepFailure(_) => "step_failure",
            Error::NotClosedForm => "not_closed_form",
            Error::Escape(_) => "escape",
            Error::FoldTooSharp(_) => "fold_too_sharp",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
