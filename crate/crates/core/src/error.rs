use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible transmission: rate is zero")]
    InfeasibleTransmission,

    #[error("infeasible solution: {0}")]
    InfeasibleSolution(String),

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("instance is infeasible: {0}")]
    InfeasibleInstance(String),

    #[error("bandwidth repair impossible: node {node} has {assigned} requests but only {capacity} MHz")]
    RepairInfeasible {
        node: usize,
        assigned: usize,
        capacity: u32,
    },

    #[error("no feasible solution found")]
    NoFeasibleSolution,

    #[error("decode failed: request {request} fits on no node")]
    InfeasibleDecode { request: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("training diverged at epoch {epoch}")]
    TrainingDiverged { epoch: usize },

    #[error("model file version {found} unsupported (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
