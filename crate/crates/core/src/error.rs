use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("vector is not normalized (norm {0:.15})")]
    NonUnitVector(f64),
    #[error("density matrix is not a state: {0}")]
    InvalidDensity(String),
    #[error("algebra is abelian; no non-commuting projections exist")]
    AbelianAlgebra,
    #[error("pair does not commute (commutator norm {0:.3e})")]
    NonCommutingPair(f64),
    #[error("factor algebras do not commute (max basis commutator {0:.3e})")]
    NonCommutingFactors(f64),
    #[error("product of the range projections vanishes (norm {0:.3e})")]
    SchliederFailure(f64),
    #[error("premise failed: {0}")]
    PremiseFailure(String),
    #[error("symmetry family is empty: no Hermitian generator commutes with the observable and fixes the vector")]
    EmptySymmetryFamily,
    #[error("degenerate exponent choice: a*b = {0} is 0 mod {1}")]
    DegenerateChoice(i64, usize),
    #[error("negative probability {0:.3e} beyond tolerance")]
    NegativeProbability(f64),
    #[error("postcondition violated: {0}")]
    Postcondition(String),
    #[error("configuration error at `{field}`: {message}")]
    InvalidConfig { field: String, message: String },
    #[error("unknown report format `{0}`")]
    UnknownFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }
}
