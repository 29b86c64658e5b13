use thiserror::Error;

/// Errors raised while building potentials, grids and discretized operators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("derivative order {0} not supported (0..=3)")]
    DerivativeOrder(u8),
    #[error("tabulated potential queried at x = {x} outside [{lo}, {hi}]")]
    Extrapolation { x: f64, lo: f64, hi: f64 },
    #[error("grid needs at least 3 interior nodes, got {0}")]
    GridTooSmall(usize),
    #[error("grid spacing {0:e} underflows when squared")]
    SpacingUnderflow(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dyadic assembly requested through the whole-line assembler")]
    DyadicScaleSet,
}

/// Errors from the banded linear algebra kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular to working precision (pivot {index} has modulus {modulus:e})")]
    Singular { index: usize, modulus: f64 },
    #[error("solve residual {residual:e} exceeds bound {bound:e}")]
    LargeResidual { residual: f64, bound: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("QR iteration stagnated at index {index} after {sweeps} sweeps")]
    Stagnation { index: usize, sweeps: usize },
    #[error("matrix dimension {n} exceeds eigensolver cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("inverse iteration diverged after {history} iterates")]
    Divergence { history: usize },
    #[error("empty matrix")]
    Empty,
    #[error("operation requires a complex symmetric matrix")]
    Unsymmetric,
}

/// Top-level error for the analysis layers (pseudospectrum, spectrum, hypocoercivity).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("unsupported potential for this operation: {0}")]
    Unsupported(String),
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("parameter condition violated: {0}")]
    ParameterCondition(String),
    #[error("time stepping failed: {0}")]
    Stepping(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
