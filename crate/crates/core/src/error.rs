use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point cloud is empty or has zero dimension")]
    EmptyCloud,
    #[error("point cloud buffer of length {len} is not a multiple of dimension {dim}")]
    RaggedCloud { len: usize, dim: usize },
    #[error("non-finite coordinate at point {point}, dimension {dim}")]
    NonFiniteCoordinate { point: usize, dim: usize },
    #[error("not enough neighbors: k = {k} requires at least {} points, cloud has {n}", k + 1)]
    NotEnoughNeighbors { k: usize, n: usize },
    #[error("degenerate bandwidth at point {point}: its sigma neighbor coincides with it (duplicate points)")]
    DegenerateBandwidth { point: usize },
    #[error("degenerate bandwidth at pixel ({x}, {y}): duplicate patches")]
    DegeneratePatch { x: usize, y: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid labels: {0}")]
    InvalidLabels(String),
    #[error("point {point} lies in a component with no labeled point; the system is singular")]
    UnlabeledComponent { point: usize },
    #[error("conjugate gradient stopped after {iterations} iterations at relative residual {residual:e}")]
    CgNotConverged { iterations: usize, residual: f64 },
    #[error("split Bregman iteration diverged at iteration {iteration} (non-finite energy)")]
    Diverged { iteration: usize },
    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("image dimensions differ: {0}")]
    ImageMismatch(String),
    #[error("mask has no observed pixels")]
    EmptyMask,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
