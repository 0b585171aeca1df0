use std::path::PathBuf;

use crate::stepper::Stage;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("entry ({row}, {col}) out of range for a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not square ({nrows}x{ncols})")]
    NotSquare { nrows: usize, ncols: usize },

    #[error("matrix is singular to working precision at pivot step {step} (largest candidate {pivot:e})")]
    Singular { step: usize, pivot: f64 },

    #[error("grid needs at least 5 interior points, got m = {0}")]
    GridTooSmall(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("diffusion coefficient must be positive, got {0}")]
    NonPositiveDiffusion(f64),

    #[error("factorization of {system} failed: {source}")]
    Setup {
        system: String,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite value in stage {stage} of step {step}")]
    Divergence { stage: Stage, step: usize },

    #[error("step size {k} does not tile the interval of length {span}")]
    StepCount { span: f64, k: f64 },

    #[error("non-finite value in input vector at index {0}")]
    NonFiniteInput(usize),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("problem `{0}` has no exact solution")]
    NoExactSolution(String),

    #[error("matrix exponential overflow (norm {0:e})")]
    ExpmOverflow(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
