use thiserror::Error;

use crate::fock::SpatialMode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spatial mode {0} appears on both sides of a tensor product")]
    LabelConflict(SpatialMode),

    #[error("beamsplitter parameter out of range: {0}")]
    ParameterRange(String),

    #[error("mode assignment reuses spatial mode {0}")]
    ModeAssignment(SpatialMode),

    #[error("duplicate spatial mode {0} in W-state layout")]
    DuplicateMode(SpatialMode),

    #[error("W state needs at least one photon")]
    EmptyWState,

    #[error("spatial mode {0} is not populated in the input state")]
    MissingMode(SpatialMode),

    #[error("input mode {mode} must hold exactly one photon in every term")]
    NotSinglePhoton { mode: SpatialMode },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("state modes {state:?} do not match target modes {target:?}")]
    ModeMismatch {
        state: Vec<SpatialMode>,
        target: Vec<SpatialMode>,
    },

    #[error("source truncated at order {0}; at least 3 is needed for multi-pair terms")]
    TruncationTooLow(u32),

    #[error("four-fold coincidence probability is zero")]
    ZeroCoincidence,

    #[error("detector efficiency {0} outside (0, 1]")]
    Efficiency(f64),

    #[error("unknown {kind} strategy '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical check failed: {0}")]
    Validation(String),

    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
