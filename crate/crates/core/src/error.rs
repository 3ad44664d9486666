use thiserror::Error;

use crate::meshcore::VertexId;

pub type Result<T, E = MeshError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("border walk exceeded {limit} steps; connectivity is corrupt")]
    CycleDetected { limit: usize },

    #[error("edge set does not form a single cycle (branching at vertex {vertex})")]
    AmbiguousRing { vertex: VertexId },

    #[error("projected ring folds onto itself")]
    ProjectionFold,

    #[error("invalid recipe: {0}")]
    Recipe(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
