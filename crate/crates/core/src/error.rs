use std::path::PathBuf;

use thiserror::Error;

use crate::mgsolver::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain top {top} is not above terrain {elevation} at column ({i}, {j})")]
    TopBelowTerrain {
        i: usize,
        j: usize,
        elevation: f64,
        top: f64,
    },

    #[error("singular element at cell ({i}, {j}, {k}): det J = {det:e} at quadrature point {point}")]
    SingularElement {
        i: usize,
        j: usize,
        k: usize,
        point: usize,
        det: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("operator corrupt: non-positive diagonal {value:e} at free node {node}")]
    OperatorCorrupt { node: usize, value: f64 },

    #[error("singular coarsest-level system")]
    SingularCoarse,

    #[error("log profile invalid: cell ({i}, {j}, {k}) center is {height:.4} m above ground, not above roughness length {z0}")]
    InvalidProfile {
        i: usize,
        j: usize,
        k: usize,
        height: f64,
        z0: f64,
    },

    #[error("solver diverged after {} cycles (relative residual {:e})", .report.cycles_used, .report.final_residual())]
    Diverged { report: Box<SolveReport> },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
