use thiserror::Error;

/// Failures raised by the exact arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("exponent {exp} of `{var}` falls below the window floor {floor}")]
    WindowUnderflow { var: String, exp: i64, floor: i32 },
    #[error("series carry different variable layouts")]
    IncompatibleVariables,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("constant term must be 1, found {0}")]
    ConstantTermNotOne(String),
    #[error("series has no invertible leading behaviour: {0}")]
    NonUnitLeading(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not a unit: {0}")]
    NotUnit(String),
    #[error("exact division left a nonzero remainder")]
    InexactDivision,
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix shapes {0}x{1} and {2}x{3} do not match")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("extension fields with different moduli were mixed")]
    ModulusMismatch,
    #[error("numeric root finder did not converge")]
    NoConvergence,
    #[error("operation needs more terms than the truncation certifies: {0}")]
    InsufficientCap(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
