use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("matrix is singular (pivot {index})")]
    Singular { index: usize },
    #[error("inverse residual {residual:e} exceeds {bound:e}")]
    InaccurateInverse { residual: f64, bound: f64 },
    #[error("power iteration did not converge in {iters} iterations (Gershgorin bound {gershgorin})")]
    NoConvergence { iters: usize, gershgorin: f64 },
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("tolerances must be positive and eps_zero < 1")]
    InvalidTolerances,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecomposeError {
    #[error("covariance is not infinitely divisible: {0}")]
    NotId(String),
    #[error("non-positive row-sum scaling at index {0}")]
    NonPositiveScaling(usize),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("Green kernel violates detailed balance at ({i}, {j})")]
    SymmetryViolation { i: usize, j: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZooError {
    #[error("beta = {0} outside (0, 2)")]
    BetaOutOfRange(f64),
    #[error("grid point {0} must be positive")]
    NonPositivePoint(usize),
    #[error("grid must be strictly increasing with finite values")]
    InvalidGrid,
    #[error("duplicate grid point {0}")]
    DuplicatePoint(usize),
    #[error("scale entry {0} must be positive")]
    NonPositiveScale(usize),
    #[error("quadrature failed on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },
    #[error("dyadic level {n} exceeds the limit {max}")]
    LevelTooLarge { n: u32, max: u32 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
