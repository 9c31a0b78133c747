use thiserror::Error;

use crate::numerics::FieldMode;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field mode mismatch: {left:?} vs {right:?}")]
    FieldMismatch { left: FieldMode, right: FieldMode },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("determinant requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("enumeration guard exceeded: {0}")]
    Guard(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A checked inequality failed on a concrete instance.
    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error("duplicate point at indices {0} and {1}")]
    DuplicatePoint(usize, usize),

    #[error("cannot contract loop element {0}")]
    ContractLoop(usize),

    #[error("element {0} is not in the ground set")]
    UnknownElement(usize),

    #[error("no special structure: point {0} lies on no line with three or more points")]
    NoSpecialStructure(usize),

    #[error("projection not generic after {0} attempts")]
    ProjectionNotGeneric(usize),

    #[error("non-integer entry at ({0}, {1})")]
    NonInteger(usize, usize),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("graver completion exceeded {0} elements")]
    GraverCutoff(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
