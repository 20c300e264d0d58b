use alloc::string::String;

use crate::domain::ObjectiveError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension `{0}` is both an objective and a fixed dimension")]
    OverlappingSets(String),
    #[error("the objective dimension set is empty")]
    EmptyObjectiveSet,
    #[error("invalid domain: {0}")]
    DomainError(String),
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("dimension `{0}` is neither an objective nor a fixed dimension")]
    UnassignedDimension(String),
    #[error("category index {index} is outside 0..{len}")]
    CategoryOutOfRange { index: i64, len: usize },
    #[error("cannot split {len} dimensions into block {index} of {parts}")]
    BadSplit { index: usize, parts: usize, len: usize },
    #[error("cannot sample from an empty region")]
    EmptyRegion,
    #[error("slot {index} requested from {slots} slots")]
    BadSlot { index: usize, slots: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("objective expects {expected} values, coordinate has {got}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}
