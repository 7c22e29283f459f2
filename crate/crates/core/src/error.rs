use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested point lies outside `Z = {x >= 0} x R^m1`.
    #[error("point is not in Z: x[{index}] = {value} < 0")]
    OutsideDomain { index: usize, value: f64 },

    /// Step size violates `eta * ||A||_2 < 1`.
    #[error("step size too large: eta * ||A||_2 = {product} (need < 1)")]
    StepTooLarge { product: f64 },

    #[error("matrix has non-integer entries; exact integer mode required")]
    NotInteger,

    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("matrix is singular")]
    Singular,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("polyhedron is empty")]
    EmptySet,

    #[error("no nonsingular square submatrix")]
    NoNonsingularSubmatrix,

    #[error("matrix is not totally unimodular (submatrix determinant {det})")]
    NotTotallyUnimodular { det: String },

    #[error("bound violated: {0}")]
    BoundViolated(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
