use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid braid word: {0}")]
    InvalidWord(String),

    #[error("crossing index {index} out of range ({count} crossings)")]
    CrossingIndex { index: usize, count: usize },

    #[error("no crossing labelled ({crossing_type},{ordinal})")]
    NoSuchCrossing { crossing_type: usize, ordinal: usize },

    #[error("state has {got} bits, expected {expected}")]
    AssignmentLength { expected: usize, got: usize },

    #[error("{crossings} crossings exceeds the limit of {limit}")]
    CrossingLimit { crossings: usize, limit: usize },

    #[error("resolutions may have up to {0} circles, more than a 64-bit generator mask holds")]
    CircleLimit(usize),

    #[error("cannot normalize a diagram containing smoothings")]
    SmoothedDiagram,

    #[error("table is already normalized")]
    AlreadyNormalized,

    #[error("homology table is empty")]
    EmptyTable,

    #[error("crossing {0} is not positive")]
    NotPositive(usize),

    #[error("torsion coefficient {0} does not fit in 64 bits")]
    TorsionOverflow(String),

    #[error("invalid parameters: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
