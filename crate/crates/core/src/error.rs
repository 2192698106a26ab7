use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range for {what} (len {len})")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("probability {value} outside [0, 1] beyond tolerance")]
    ValueOutOfRange { value: f64 },
    #[error("table would have {entries} entries, cap is {cap}")]
    CapExceeded { entries: usize, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("transform is singular")]
    SingularTransform,
    #[error("transform is not Hermitian- and trace-preserving")]
    NotHptp,
    #[error("representation is not physical")]
    NotPhysical,
    #[error("{what} are not complete: rank {rank} < {needed}")]
    NotComplete { what: &'static str, rank: usize, needed: usize },
    #[error("representations are not distribution-equivalent (max deviation {0:e})")]
    NotEquivalent(f64),
    #[error("gauge formulas disagree by {0:e}")]
    InconsistentGauge(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("image is not a rank-1 projection: {0}")]
    NotProjection(String),
    #[error("overlap pattern does not match the projection set: {0}")]
    GramMismatch(String),
    #[error("F = {f} outside the physical window (1, {f_max}]")]
    FOutOfWindow { f: f64, f_max: f64 },
    #[error("model is trivial")]
    TrivialModel,
    #[error("matrix is proportional to the identity")]
    TrivialMatrix,
    #[error("matrix is traceless; its unitary orbit cannot span the identity direction")]
    TracelessMatrix,
    #[error("matrix is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
