use thiserror::Error;

/// Errors produced by the topology toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopoError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("degenerate simplex: condition number {0:.3e} exceeds limit")]
    DegenerateSimplex(f64),
    #[error("point set is rank deficient (eigenvalue ratio {0:.3e})")]
    RankDeficient(f64),
    #[error("requested {k} neighbours but the cloud only has {available} other points")]
    KTooLarge { k: usize, available: usize },
    #[error("vertex {0} has no value")]
    MissingVertexValue(usize),
    #[error("filtration is not monotone: {0}")]
    NonMonotoneFiltration(String),
    #[error("complex has {0} simplices, the rank oracle accepts at most {1}")]
    ComplexTooLarge(usize, usize),
    #[error("diagram contains an infinite bar; cap it before computing distances")]
    UncappedInfiniteBar,
    #[error("diagram has {0} points in one dimension, brute force accepts at most {1}")]
    DiagramTooLarge(usize, usize),
    #[error("cloud has {points} points, need at least {needed}")]
    CloudTooSmall { points: usize, needed: usize },
    #[error("image has {0} pixels after subsampling, need at least 4")]
    ImageTooSmall(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite loss at iteration {0}")]
    NonFiniteLoss(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = TopoError> = std::result::Result<T, E>;
