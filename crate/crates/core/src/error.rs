use thiserror::Error;

use crate::sideband_solver::SidebandSign;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` must be finite")]
    NonFinite { name: &'static str },

    #[error("rate `{name}` is negative ({value})")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("mechanical frequency omega_m must be positive ({0})")]
    NonPositiveMechanicalFrequency(f64),

    #[error("external coupling exceeds total for cavity `{cavity}` ({external} > {total})")]
    ExternalExceedsTotal {
        cavity: &'static str,
        external: f64,
        total: f64,
    },

    #[error("mechanical cavity has a single port: kappa_m_ex ({external}) must equal kappa_m ({total})")]
    MechanicalPortMismatch { external: f64, total: f64 },

    #[error("invalid drive: {0}")]
    InvalidDrive(String),

    #[error("steady amplitude of cavity `{cavity}` is singular (undamped resonant drive)")]
    SingularAmplitude { cavity: &'static str },

    #[error("invalid integration step: {0}")]
    InvalidStep(String),

    #[error("integration step too coarse: half-step relative drift {drift:.3e} exceeds 1e-6")]
    StepTooCoarse { drift: f64 },

    #[error("mechanical damping kappa_m must be positive for the sideband recursion")]
    UndampedMechanics,

    #[error("singular matrix in {context} (condition estimate {condition:.3e})")]
    Singular { context: String, condition: f64 },

    #[error("singular 2x2 block {block} of X[{k}] on the {sign} sideband chain")]
    SingularBlock {
        sign: SidebandSign,
        k: usize,
        block: usize,
    },

    #[error("unknown port `{0}`")]
    UnknownPort(String),

    #[error("no crossing in range")]
    NoCrossing,

    #[error("at {axis} = {value:.6e}: {source}")]
    AtGridPoint {
        axis: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by bad input (exit code 1) as opposed to numerical
    /// failures (exit code 2).
    pub fn is_validation(&self) -> bool {
        match self {
            Error::NonFinite { .. }
            | Error::NegativeRate { .. }
            | Error::NonPositiveMechanicalFrequency(_)
            | Error::ExternalExceedsTotal { .. }
            | Error::MechanicalPortMismatch { .. }
            | Error::InvalidDrive(_)
            | Error::InvalidStep(_)
            | Error::UnknownPort(_)
            | Error::Config(_)
            | Error::Io(_) => true,
            Error::AtGridPoint { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
