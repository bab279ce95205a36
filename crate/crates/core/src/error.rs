use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("cyclic graph")]
    CyclicGraph,
    #[error("priority list is not a topological order")]
    NotTopological,
    #[error("task {task} allocated to {side} but has no finite time there")]
    IncompatibleAssignment { task: usize, side: &'static str },
    #[error("LP requires finite times (task {0} is incompatible on one side)")]
    LpRequiresFiniteTimes(usize),
    #[error("solver: {0}")]
    Solver(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("instance too large for oracle: {0}")]
    OracleCaps(String),
    #[error("instance too large: {what} = {have}, cap = {cap}; raise the cap to at least {have}")]
    SizeCap {
        what: &'static str,
        have: u64,
        cap: u64,
    },
    #[error("yes-case construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
