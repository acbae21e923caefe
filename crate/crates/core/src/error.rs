use thiserror::Error;

use crate::triple::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("no distance entry for pair ({0}, {1})")]
    MissingPair(String, String),
    #[error("distance for pair ({0}, {1}) given more than once")]
    DuplicatePair(String, String),
    #[error("no weight for point `{0}`")]
    MissingWeight(String),
    #[error("distance d({0}, {0}) is outside the domain")]
    Diagonal(String),
    #[error("ground set has {n} points, at most {max} supported")]
    TooManyPoints { n: usize, max: usize },
    #[error("ultrametric inequality fails on {} triple(s): {}", .0.len(), format_violations(.0))]
    NotUltrametric(Vec<Violation>),

    #[error("point `{0}` is already in the set")]
    PointInSet(String),
    #[error("point `{0}` occurs twice in the sequence")]
    DuplicateInSequence(String),
    #[error("{0}")]
    SizeMismatch(String),
    #[error("function is not defined at {0}")]
    Undefined(String),
    #[error("function decreases between {lo} and {hi}")]
    NotMonotone { lo: String, hi: String },
    #[error("set of size {size} exceeds family depth {depth}")]
    DepthExceeded { size: usize, depth: usize },

    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("{0}")]
    NoWitness(String),
    #[error("invalid distance profile: {0}")]
    InvalidProfile(String),
    #[error("functional is not profile-only: {0}")]
    NotProfileOnly(String),

    #[error("input of size {n} exceeds the enumeration cap of {cap}")]
    SizeCap { n: usize, cap: usize },
    #[error("set is not of maximum perimeter: {0}")]
    NotMaximal(String),
    #[error("theorem check failed: {0}")]
    Falsified(String),

    #[error("{field}: {message}")]
    Spec { field: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn spec(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True when the error means a checked theorem did not hold, as opposed
    /// to bad input.
    pub fn is_falsification(&self) -> bool {
        matches!(self, Error::Falsified(_))
    }
}

fn format_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
