use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid spline specification: {0}")]
    InvalidSpline(String),

    #[error("evaluation point {x} outside [0, 1]; rescale covariates before expansion")]
    Domain { x: f64 },

    #[error("non-finite value in {what} at row {row}, column {col}")]
    NonFinite { what: String, row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid response for family {family}: {reason}")]
    Response { family: String, reason: String },

    #[error("working design is rank deficient near column {col}: {reason}")]
    RankDeficient { col: usize, reason: String },

    #[error("quasi-likelihood maximization did not converge after {iterations} iterations: {reason}")]
    NonConvergence { iterations: usize, reason: String },

    #[error(
        "the quasi-likelihood maximum lies at infinity: fitted means pinned at \
         the response boundary (separation)"
    )]
    Separation,

    #[error("matrix is singular or not positive definite: {0}")]
    Singular(String),

    #[error(
        "estimated D matrix violates the positive-definiteness condition (C9): \
         smallest eigenvalue {min_eig:e} < 1e-10 x largest {max_eig:e}"
    )]
    DNotPositiveDefinite { min_eig: f64, max_eig: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("all submodels were excluded from weighting")]
    AllSubmodelsExcluded,

    #[error("focus specification error: {0}")]
    Focus(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
