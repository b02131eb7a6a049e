use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value of {what} at x = {x}")]
    Evaluation { what: &'static str, x: f64 },

    #[error("non-finite integral on element {element}")]
    NonFiniteElement { element: usize },

    #[error("zero pivot in tridiagonal elimination at row {row}")]
    ZeroPivot { row: usize },

    #[error("mesh nodes not strictly increasing at index {index}")]
    NonMonotoneMesh { index: usize },

    #[error("functions live on different meshes")]
    MeshMismatch,

    #[error("convergence rate undefined for errors {e_n} and {e_2n}")]
    UndefinedRate { e_n: f64, e_2n: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("reference table id {0} out of range 1..=6")]
    ReferenceId(u8),

    #[error("malformed reference data: {0}")]
    ReferenceData(String),

    #[error("internal numerical failure: {0}")]
    Internal(String),
}

impl Error {
    /// Numerical failures (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Evaluation { .. }
                | Error::NonFiniteElement { .. }
                | Error::ZeroPivot { .. }
                | Error::NonMonotoneMesh { .. }
                | Error::Internal(_)
        )
    }
}
