use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} parameters, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("wire index {wire} out of range for {n_wires} wires")]
    WireOutOfRange { wire: usize, n_wires: usize },
    #[error("wire count must be between 1 and 12, got {0}")]
    BadWireCount(usize),
    #[error("parameter index {0} must appear in exactly one rotation gate")]
    ParamIndexCoverage(usize),
    #[error("pauli string has {got} letters but the circuit has {expected} wires")]
    PauliLength { expected: usize, got: usize },
    #[error("shot count must be at least 1")]
    InvalidShotCount,
    #[error("shift s = {0} is a multiple of pi; the rule denominator vanishes")]
    SingularShift(f64),
    #[error("general shifts are only derived for orders 1 and 2; order {order} requires s = pi/2")]
    UnsupportedShift { order: usize },
    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("scheme does not support derivative order {order}")]
    UnsupportedScheme { order: usize },
    #[error("empty derivative index list")]
    EmptyIndices,
    #[error("trigonometric reconstruction supports at most 8 parameters, got {0}")]
    SurrogateTooLarge(usize),
    #[error("matrix is not unitary within tolerance")]
    NonUnitaryMatrix,
    #[error("matrix is not symmetric within 1e-8")]
    NotSymmetric,
    #[error("max-eig regularization requires a positive leading eigenvalue")]
    NonPositiveSpectrum,
    #[error("optimal step is undefined for zero curvature")]
    ZeroCurvature,
    #[error("lambda* is undefined when both the gradient and the variance vanish")]
    UndefinedLambda,
    #[error("at least 2 repetitions required")]
    TooFewRepetitions,
    #[error("invalid estimator spec: {0}")]
    InvalidSpec(String),
    #[error("singular matrix in optimizer step")]
    SingularMatrix,
    #[error("circuit parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
