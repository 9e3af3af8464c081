use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Bianchi tag {0}: expected 1..=8")]
    InvalidTag(i64),
    #[error("type ({0}) requires a parameter theta")]
    MissingTheta(u8),
    #[error("type ({0}) takes no parameter")]
    ForbiddenTheta(u8),
    #[error("theta violates the constraint for type ({tag}): {reason}")]
    ThetaConstraint { tag: u8, reason: &'static str },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-finite float value")]
    NonFinite,
    #[error("parameter constraint violated: {0}")]
    Constraint(String),
    #[error("family {family} is not admissible on algebra {algebra}")]
    NotAdmissible { family: String, algebra: String },
    #[error("constructed matrix failed self-verification: {0}")]
    SelfVerification(String),
    #[error("matrix is not an almost complex structure (|J^2 + I| = {0:e})")]
    NotAcs(f64),
    #[error("structure is not integrable (max Nijenhuis residual {0:e})")]
    NotIntegrable(f64),
    #[error("scalar mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
