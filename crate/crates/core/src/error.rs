use thiserror::Error;

/// Everything that can go wrong while loading, building or traversing a graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arc {source_vertex}[{slot}] -> {target} points outside 0..{num_vertices}")]
    TargetOutOfRange {
        source_vertex: usize,
        slot: usize,
        target: usize,
        num_vertices: usize,
    },
    #[error("duplicate arc {0} -> {1}")]
    DuplicateArc(usize, usize),
    #[error("syntax error on line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("header declares {declared} arcs but {seen} arc lines were found")]
    CountMismatch { declared: usize, seen: usize },
    #[error("slot {slot} of vertex {vertex} is already eliminated")]
    AlreadyEliminated { vertex: usize, slot: usize },
    #[error("start vertex {0} is not a vertex of the graph")]
    InvalidStart(usize),
    #[error("start vertex {0} was already visited")]
    AlreadyVisited(usize),
    #[error("par-block wrote {0} more than once")]
    WriteConflict(crate::engine::Location),
    #[error("{m} arcs requested but a simple digraph on {n} vertices has at most {max}")]
    TooManyArcs { n: usize, m: usize, max: usize },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("processor count must be at least 1")]
    NoProcessors,
    #[error("worker pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
