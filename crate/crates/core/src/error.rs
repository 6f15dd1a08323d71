use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    Trace { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("state vector norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("{name} = {value} is out of range ({range})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("index {index} out of range for {what} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("operation requires {required}, got {d1}x{d2}")]
    UnsupportedDimensions {
        required: &'static str,
        d1: usize,
        d2: usize,
    },

    #[error("matrix function undefined at eigenvalue {eigenvalue:e}")]
    FunctionUndefined { eigenvalue: f64 },

    #[error("direction vector has norm {norm}, expected 1")]
    NotUnitVector { norm: f64 },

    #[error("measurement basis is not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("probability table setting ({i},{j}) sums to {sum}")]
    TableNormalization { i: usize, j: usize, sum: f64 },

    #[error("filtered state has vanishing trace {trace:e}")]
    VanishingTrace { trace: f64 },

    #[error("points are collinear")]
    Collinear,

    #[error("points do not form a line")]
    NotALine,

    #[error("reference state coincides with the target state")]
    DegenerateReference,

    #[error("unsupported map: {0}")]
    UnsupportedMap(String),

    #[error("state file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
