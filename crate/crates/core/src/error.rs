use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not in the conjugate-persymmetric algebra (defect {defect:e})")]
    NotInPibar { defect: f64 },
    #[error("lambda = {lambda} is degenerate for chi (0 or 1/k)")]
    DegenerateLambda { lambda: String },
    #[error("boundary condition is not well-posed (relative det {relative_det:e})")]
    NotWellPosed { relative_det: f64 },
    #[error("point {value} lies outside [-{l}, {l}]")]
    OutOfDomain { value: f64, l: f64 },
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("X_lambda(x) is numerically singular (sigma ratio {ratio:e}); lambda is in or near Spec K_Q")]
    SingularX { ratio: f64 },
    #[error("lambda = {lambda} is within the exclusion zone of Spec K_Q (sigma ratio {ratio:e})")]
    InSpecQ { lambda: f64, ratio: f64 },
    #[error("image vector vanishes: |G0 r| = {norm:e}")]
    ZeroImage { norm: f64 },
    #[error("invalid beam parameters: {0}")]
    InvalidParams(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
