use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max |U^dagger U - I| = {0:e})")]
    NotUnitary(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid subsystem selection: {0}")]
    Partition(String),
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
    #[error("zero-probability label carries quasiprobability {weight:e} at {context}")]
    RankDeficient { context: String, weight: f64 },
    #[error("function is not finite on the support at {0}")]
    NonFiniteOnSupport(String),
    #[error("conditioning probability {0:e} is below threshold")]
    ConditioningTooSmall(f64),
    #[error("invalid circuit: {0}")]
    Circuit(String),
    #[error("interference angle {0} is too close to a multiple of pi")]
    DegenerateAngle(f64),
    #[error("missing amplitude table entry: {0}")]
    MissingAmplitude(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
