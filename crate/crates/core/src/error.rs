use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid sector: {0}")]
    InvalidSector(String),
    #[error("pole encountered: {0}")]
    Pole(String),
    #[error("coincident positions: {0}")]
    CoincidentPositions(String),
    #[error("slot {0} is already occupied")]
    SlotOccupied(usize),
    #[error("unknown resolvent point {0}")]
    UnknownPoint(usize),
    #[error("operator too large to serialize ({0} entries)")]
    TooLarge(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("near collision: {0}")]
    Collision(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

pub type Result<T> = std::result::Result<T, Error>;
