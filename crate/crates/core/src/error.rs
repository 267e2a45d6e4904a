use thiserror::Error;
use whr_algebra::AlgebraError;

/// Failures raised by the Hurwitz, tau, kernel and recursion layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("partition weights differ: {0} vs {1}")]
    WeightMismatch(u32, u32),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("at least one ramification profile is required")]
    EmptyProfileList,
    #[error("degree {n} exceeds the oracle bound {bound}")]
    OracleBoundExceeded { n: u32, bound: u32 },
    #[error("Riemann-Hurwitz data do not give an integer genus: 2-2g = {0}")]
    NonIntegerGenus(i64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("weight parameters are symbolic; numeric coefficients are required here")]
    SymbolicWeight,
    #[error("window [{lo}, {hi}] is too narrow: {reason}")]
    WindowTooNarrow { lo: i32, hi: i32, reason: String },
    #[error("coefficient beyond the certified cap: {0}")]
    InsufficientCap(String),
    #[error("matrix A is singular")]
    SingularA,
    #[error("S is degenerate: {0}")]
    DegenerateS(String),
    #[error("ramification point {0} is not simple")]
    HigherOrderRamification(String),
    #[error("ramification points need a field tower that is not supported: {0}")]
    UnsupportedFieldTower(String),
    #[error("involution jet did not stabilise at order {0}")]
    JetTooShort(usize),
    #[error("sheets coincide or nearly coincide at the sample point")]
    NearBranchPoint,
    #[error("missing lower form omega_({0},{1})")]
    MissingDependency(u32, u32),
    #[error("numeric precision is insufficient: {0}")]
    InsufficientPrecision(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
