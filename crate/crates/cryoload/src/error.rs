//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "temperature {t} K is outside the evaluable range {lo}..{hi} K of material `{material}`"
    )]
    TemperatureOutOfRange {
        material: String,
        t: f64,
        lo: f64,
        hi: f64,
    },

    #[error("quadrature did not reach relative tolerance {tol:e} within {max_depth} subdivisions (estimate {estimate:e})")]
    IntegrationFailure {
        tol: f64,
        max_depth: u32,
        estimate: f64,
    },

    #[error("no measurements remain after filtering at {t_cap} K ({removed} removed)")]
    EmptyAfterFilter { t_cap: f64, removed: usize },

    #[error(
        "{points} data points are not enough for a degree-{degree} fit (need at least {needed})"
    )]
    InsufficientData {
        points: usize,
        degree: usize,
        needed: usize,
    },

    #[error("least-squares system is rank-deficient (rank {rank} of {cols}); check for duplicated temperatures")]
    SingularSystem { rank: usize, cols: usize },

    #[error("attenuation must be positive, got {0} dB")]
    InvalidAttenuation(f64),

    #[error("line kind {0} carries no target current; only DC flux lines can be back-propagated")]
    NoTargetCurrent(String),

    #[error("unknown stage `{0}`")]
    UnknownStage(String),

    #[error("unknown material `{0}`")]
    UnknownMaterial(String),

    #[error("wiring requires {required} lines but the fridge provides {capacity}")]
    CapacityExceeded { required: usize, capacity: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
