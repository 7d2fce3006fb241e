use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("model graph is disconnected ({components} components); irreducible models only")]
    Disconnected { components: usize },

    #[error("h is not excessive: transformed killing negative at states {states:?}")]
    NotExcessive { states: Vec<usize> },

    #[error("form matrix is singular or indefinite: model is not transient")]
    NotTransient,

    #[error("supercritical input: bottom of the spectrum gamma = {gamma}")]
    Supercritical { gamma: f64 },

    #[error("potential vanishes at state {state}; cannot form mu / R mu")]
    VanishingPotential { state: usize },

    #[error("sequence is not monotone nonincreasing at index {index}")]
    NonMonotone { index: usize },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("Feynman-Kac weight overflow (A_t = {additive_functional:.1}); reduce t or the truncation level M")]
    ExplodingWeights { additive_functional: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
