use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("|det - 1| = {deviation:e} exceeds tolerance")]
    NotUnitDeterminant { deviation: f64 },
    #[error("matrix is not positive definite: radicand {radicand:e} at diagonal {index}")]
    NotPositiveDefinite { index: usize, radicand: f64 },
    #[error("matrix is not upper triangular with positive diagonal")]
    NotUpperTriangularPositive,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not in SU(2) (unitarity {unitarity:e}, det {det:e})")]
    NotSpecialUnitary { unitarity: f64, det: f64 },
    #[error("subgroup {0} is infinite")]
    InfiniteSpec(String),
    #[error("group closure exceeded {0} elements")]
    ClosureOverflow(usize),
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("no structural pattern is available for {0}")]
    UnsupportedCase(String),
    #[error("value {raw} is not within tolerance of an integer")]
    NonIntegral { raw: f64 },
    #[error("polynomial pair is not unimodular (bracket is not 1)")]
    NotUnimodular,
    #[error("pair vanishes simultaneously at {re} + {im}i")]
    EvaluationAtCommonZero { re: f64, im: f64 },
    #[error("grid has {nodes} interior nodes along an axis; at least 5 required")]
    GridTooCoarse { nodes: usize },
    #[error("non-positive log-Laplacian {value:e} at node ({x}, {y})")]
    NonPositiveLaplacian { x: f64, y: f64, value: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
