use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("directed cycle through {0}")]
    Cycle(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{var}` has no state `{state}`")]
    UnknownState { var: String, state: String },

    #[error("duplicate identifier `{0}`")]
    Duplicate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("configuration count {size} exceeds cap {cap}")]
    SizeCapExceeded { size: u128, cap: u128 },

    #[error("conditioning event has zero probability: {0}")]
    ZeroProbabilityEvidence(String),

    #[error("positivity violated: p({treatment}={level} | {stratum}) = 0 in a stratum of positive probability")]
    PositivityViolation {
        treatment: String,
        level: String,
        stratum: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("endpoints do not bracket the inputs: {0}")]
    InfeasibleEndpoints(String),

    #[error("endpoints coincide while inputs differ")]
    DegenerateEndpoints,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("dataset I/O: {0}")]
    Io(String),
}

/// Coarse error classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad names or arguments supplied by the caller.
    Usage,
    /// Malformed or invalid model/dataset input.
    Input,
    /// The requested quantity is mathematically undefined or infeasible.
    Math,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            UnknownNode(_) | UnknownVariable(_) | UnknownState { .. } | InvalidArgument(_) => {
                ErrorClass::Usage
            }
            Cycle(_) | Duplicate(_) | Validation(_) | Structure(_) | EmptyDataset | Io(_) => {
                ErrorClass::Input
            }
            SizeCapExceeded { .. }
            | ZeroProbabilityEvidence(_)
            | PositivityViolation { .. }
            | InfeasibleEndpoints(_)
            | DegenerateEndpoints
            | Domain(_) => ErrorClass::Math,
        }
    }
}
