use thiserror::Error;

use crate::model::TaskId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("unknown task id {0}")]
    UnknownTaskId(TaskId),

    #[error("task {0} appears more than once in a sequence")]
    DuplicateTask(TaskId),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("generator spec cannot be satisfied: {0}")]
    InfeasibleSpec(String),

    #[error("instance too large for brute-force enumeration ({tasks} tasks, limit {limit})")]
    TooLarge { tasks: usize, limit: usize },

    #[error("LP solver failed: {0}")]
    NumericalFailure(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
