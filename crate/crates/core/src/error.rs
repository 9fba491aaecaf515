use thiserror::Error;

/// Errors surfaced by scheme construction, solvers and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("formula must have zero mean, found sum {0}")]
    NonZeroMean(String),

    #[error("order of consistency must be an even positive integer, got {0}")]
    OddOrder(u32),

    #[error("boundary order must be even, got {0}")]
    OddBoundaryOrder(u32),

    #[error("tolerance must be finite and positive, got {0}")]
    BadTolerance(f64),

    #[error("matrix is singular to working precision (pivot magnitude {pivot:e} at step {step})")]
    SingularSystem { pivot: f64, step: usize },

    #[error("exact resonance: eigenvalue {index} of {size} vanishes")]
    ExactResonance { index: usize, size: usize },

    #[error("approximation problem ({l},{m}) has nullspace dimension {dim}, expected 1")]
    DegenerateApproximant { l: usize, m: usize, dim: usize },

    #[error("linear system for weights ({l},{m}) is singular")]
    SingularWeightSystem { l: usize, m: usize },

    #[error("order fit needs at least 3 usable rows, got {0}")]
    TooFewRows(usize),

    #[error("{0} is not a quadratic irrational: {1}")]
    NotQuadraticIrrational(String, String),

    #[error("unknown problem name `{0}`")]
    UnknownProblem(String),

    #[error("invalid formula JSON: {0}")]
    BadFormulaJson(String),
}

pub type Result<T> = std::result::Result<T, Error>;
