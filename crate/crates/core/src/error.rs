use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised across the manifold, solver and classifier layers.
///
/// Scalar payloads are widened to `f64` so the error type stays independent
/// of the scalar parameter of the computation that produced it.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {deviation:e}")]
    NotSymmetric { row: usize, col: usize, deviation: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:e} <= floor {floor:e}")]
    NotPositiveDefinite { min_eigenvalue: f64, floor: f64 },

    #[error("degenerate matrix: eigenvalue {min_eigenvalue:e} below floor {floor:e}")]
    DegenerateMatrix { min_eigenvalue: f64, floor: f64 },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("symmetric eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_diagonal:e})")]
    EigenNonConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("iteration cap of {iterations} reached with residual {residual:e}")]
    MaxIterExceeded {
        iterations: usize,
        residual: f64,
        /// Row-major entries of the last iterate.
        last_iterate: Vec<f64>,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid simplex weights: {0}")]
    InvalidWeights(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("objective returned a non-finite value at iteration {iteration}")]
    NonFiniteObjective { iteration: usize, iterate: Vec<f64> },

    #[error("Gram matrix is not symmetric positive semi-definite (smallest eigenvalue {min_eigenvalue:e}, asymmetry {asymmetry:e})")]
    InvalidGram { min_eigenvalue: f64, asymmetry: f64 },

    #[error("covariance is rank deficient: smallest eigenvalue {min_eigenvalue:e} < floor {floor:e}; try ridge >= {suggested_ridge:e}")]
    RankDeficient {
        min_eigenvalue: f64,
        floor: f64,
        suggested_ridge: f64,
    },

    #[error("grid of {rows}x{cols} is smaller than the required {min}x{min}")]
    GridTooSmall { rows: usize, cols: usize, min: usize },

    #[error("{what} = {value} is out of range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("fixture construction failed after {attempts} attempts")]
    ConstructionFailed { attempts: usize },

    #[error("class {label}: {source}")]
    Class {
        label: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_class(self, label: impl ToString) -> Self {
        Error::Class {
            label: label.to_string(),
            source: Box::new(self),
        }
    }
}
