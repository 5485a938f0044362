use thiserror::Error;

use crate::grid::{Line, Vertex};

/// Every failure the library can report.
///
/// Variants are grouped by the layer that raises them; the FFI crate maps each
/// group onto a stable integer code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("grid dimensions {m}x{n} are too small (both must be at least 3)")]
    DimensionTooSmall { m: i32, n: i32 },
    #[error("door {0} is not a corner of the grid")]
    InvalidDoor(Vertex),
    #[error("vertex {0} lies outside the grid")]
    OutOfGrid(Vertex),
    #[error("line {0} lies outside the grid")]
    LineOutOfGrid(Line),
    #[error("vertex {0} is not on the requested boundary line")]
    NotOnBoundary(Vertex),
    #[error("vertex {0} is a corner, its boundary line is ambiguous")]
    AtCorner(Vertex),
    #[error("both lines share the {0:?} axis")]
    ParallelLines(crate::grid::Axis),

    #[error("robot {0} is not active")]
    NotActive(crate::config::RobotId),

    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
    #[error("scripted resource move {index} ({mv}) is illegal in round {round}")]
    IllegalScript {
        index: usize,
        round: u64,
        mv: crate::adversary::ResourceMove,
    },
    #[error("resource script ran out after {0} moves")]
    ScriptExhausted(usize),
    #[error("strategy proposed illegal resource move {mv} in round {round}")]
    IllegalResourceMove {
        round: u64,
        mv: crate::adversary::ResourceMove,
    },
    #[error("the episode is already finished")]
    EpisodeFinished,
    #[error("malformed script line {line}: {reason}")]
    ScriptParse { line: usize, reason: String },
    #[error("invalid activation schedule: {0}")]
    InvalidSchedule(String),

    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error("state space exceeded the limit of {0} states")]
    StateSpaceExceeded(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
