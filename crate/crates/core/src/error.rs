use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // linalg
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    // hypergraph
    #[error("hyperedge {edge} has {size} distinct vertices, expected {k}")]
    NotUniform { edge: usize, size: usize, k: usize },
    #[error("vertex {vertex} has degree {degree}, expected {expected}")]
    NotRegular {
        vertex: usize,
        degree: usize,
        expected: usize,
    },
    #[error("hyperedge {second} duplicates hyperedge {first}")]
    DuplicateHyperedge { first: usize, second: usize },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("expected {expected} hyperedges (n*d/k), got {actual}")]
    CountMismatch { expected: usize, actual: usize },
    #[error("columns {0} and {1} have the same neighbourhood (multiple hyperedges)")]
    MultipleHyperedges(usize, usize),
    #[error("cycle length {0} outside the supported range 1..=8")]
    LengthTooLarge(usize),
    #[error("vertex set must be nonempty")]
    EmptySet,

    // sampler / parameters
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("retry limit of {0} exceeded")]
    RetryLimitExceeded(usize),

    // spectra
    #[error("density integrates to {0}, not 1")]
    DensityNotNormalized(f64),
    #[error("interval width {width} is below the required minimum {required}")]
    IntervalTooNarrow { width: f64, required: f64 },

    // walks
    #[error("no spectral gap: lambda = {lambda} is not below d(k-1) = {top}")]
    NoSpectralGap { lambda: f64, top: f64 },
    #[error("(d, k) = (2, 2) has no non-backtracking stationary behaviour")]
    DegenerateParameters,
    #[error("negative input {0}")]
    NegativeInput(f64),
}
