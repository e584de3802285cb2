use thiserror::Error;

use crate::fock::ModeId;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by state construction, optical elements, detection and metrology.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("occupation has {found} entries but the register has {expected} modes")]
    LengthMismatch { expected: usize, found: usize },

    #[error("negative photon count {count} at position {position}")]
    NegativeCount { position: usize, count: i64 },

    #[error("{photons} photons exceed the cap of {cap}")]
    PhotonCapExceeded { photons: usize, cap: usize },

    #[error("{modes} modes exceed the cap of {cap}")]
    ModeCapExceeded { modes: usize, cap: usize },

    #[error("mode {0} appears twice in a register")]
    DuplicateMode(ModeId),

    #[error("registers overlap on mode {0}")]
    OverlappingRegisters(ModeId),

    #[error("registers do not match")]
    RegisterMismatch,

    #[error("mode {0} is not in the register")]
    UnknownMode(ModeId),

    #[error("invalid path label {0:?}")]
    InvalidPathLabel(String),

    #[error("invalid mode label {0:?}")]
    InvalidModeLabel(String),

    #[error("paths must be distinct, got {0:?} twice")]
    IdenticalPaths(String),

    #[error("ensemble has zero trace")]
    ZeroTrace,

    #[error("state is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("transform is not unitary (max deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("beam splitter coefficients t = {t}, r = {r} do not satisfy t^2 + r^2 = 1")]
    InvalidSplitting { t: f64, r: f64 },

    #[error("detector efficiency {0} is outside [0, 1]")]
    InvalidEfficiency(f64),

    #[error("tap transmittance {0} is outside (0, 1]")]
    InvalidTransmittance(f64),

    #[error("branch weight {0} is negative or not finite")]
    InvalidWeight(f64),

    #[error("number-resolved projection over several modes leaves a mixed state")]
    MixedOutcome,

    #[error("phase sensitivity is undefined at phi = {phi} (fringe extremum)")]
    UndefinedSensitivity { phi: f64 },

    #[error("no efficiency in [0, 1] reaches sensitivity {target}")]
    NoRoot { target: f64 },

    #[error("expected a single-path (H, V) register")]
    NotSinglePath,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
