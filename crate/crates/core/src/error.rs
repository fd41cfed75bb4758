use thiserror::Error;

use crate::mcg::OrbitBall;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("word is trivial after reduction")]
    TrivialWord,
    #[error("all generators are trivial")]
    TrivialSubgroup,
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    /// The orbit ball grew past its cap. The elements found so far are kept.
    #[error("orbit ball exceeded cap of {cap} elements")]
    BallLimit { cap: usize, partial: Box<OrbitBall> },
    #[error("class {0} is parabolic and has no geodesic length")]
    Parabolic(String),
    #[error("|trace| < 2 for nontrivial word {0}; representation is not discrete")]
    Discreteness(String),
    #[error("surface validation failed: {}", .0.join("; "))]
    Surface(Vec<String>),
    #[error("config error: {0}")]
    Config(String),
    #[error("internal consistency: {0}")]
    InternalConsistency(String),
    #[error("lemma hypothesis violated: {0}")]
    LemmaHypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
