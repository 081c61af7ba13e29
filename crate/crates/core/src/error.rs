use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("circulant embedding not positive semidefinite after {attempts} padding attempts (min eigenvalue ratio {min_ratio:e})")]
    PaddingExhausted { attempts: usize, min_ratio: f64 },

    #[error("grids are not nested: {0}")]
    NestingViolation(String),

    #[error("solver did not converge in {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("at least 2 shifts are required for variance estimation, got {0}")]
    InsufficientShifts(usize),

    #[error("cost budget exceeded: spent {spent:e}, cap {cap:e}, remaining variance {variance:e} > {target:e}")]
    BudgetExceeded {
        spent: f64,
        cap: f64,
        variance: f64,
        target: f64,
    },

    #[error("level {level}, sample {sample}: {source}")]
    Sample {
        level: usize,
        sample: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("generating vector: {0}")]
    GeneratingVector(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code: 2 for configuration problems, 3 for failures while
    /// computing, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::GeneratingVector(_) => 2,
            Error::Io(_) | Error::Csv(_) => 1,
            _ => 3,
        }
    }

    pub(crate) fn in_sample(self, level: usize, sample: usize) -> Self {
        match self {
            e @ Error::Sample { .. } => e,
            e => Error::Sample {
                level,
                sample,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
