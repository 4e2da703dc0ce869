use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty space: {0}")]
    EmptySpace(String),

    /// The sparse Cholesky factorization of a stiffness matrix broke down.
    #[error("stiffness matrix is numerically singular")]
    SingularStiffness,

    /// The denominator Gram matrix of a generalized eigenproblem is (numerically) singular.
    #[error("ill-posed denominator: smallest eigenvalue {min_eigenvalue:e} is below {threshold:e}")]
    IllPosedDenominator { min_eigenvalue: f64, threshold: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("computation exceeded its budget of {budget_seconds} s")]
    BudgetExceeded { budget_seconds: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
