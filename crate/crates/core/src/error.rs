use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("kernel is not torsion-free: {0}")]
    TorsionCheck(String),

    #[error("malformed complex: {0}")]
    MalformedComplex(String),

    #[error("wall {0} is one-sided")]
    OneSidedWall(usize),

    #[error("walls are not good: {0}")]
    BadWalls(String),

    #[error("size cap of {cap} exceeded")]
    SizeCap { cap: usize },

    #[error("comparison undecided at working precision: {0}")]
    Precision(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
