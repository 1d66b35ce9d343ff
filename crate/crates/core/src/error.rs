use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),

    #[error("modulus {0} is out of range (need 2 <= q < 2^31)")]
    ModulusOutOfRange(u64),

    #[error("operands belong to different fields (q={left} vs q={right})")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("division by zero")]
    DivideByZero,

    #[error("matrix dimensions do not agree: {0}")]
    DimensionMismatch(String),

    #[error("linear system is singular (rank {rank}, need {needed})")]
    SingularSystem { rank: usize, needed: usize },

    #[error("linear system has no solution")]
    InconsistentSystem,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("field size {q} is below the required bound {required}")]
    FieldTooSmall { q: u64, required: u128 },

    #[error("stage {stage} has fewer than {alpha} distinct earlier failures")]
    NotEnoughHistory { stage: usize, alpha: usize },

    #[error("no unused symbol index left for node {node} at stage {stage}")]
    ExhaustedIndices { node: usize, stage: usize },

    #[error("invalid failure history: {0}")]
    InvalidHistory(String),

    #[error("active-vertex construction at stage {stage} realized {realized} vertices, expected {expected}")]
    InfeasibleLinking {
        stage: usize,
        realized: usize,
        expected: usize,
    },

    #[error("no acceptable local coefficients for node {failed} at stage {stage} after {retries} attempts")]
    CoefficientSearchExhausted {
        stage: usize,
        failed: usize,
        retries: u32,
    },

    #[error("helper node {0} has no payload")]
    MissingHelper(usize),

    #[error("instance too large for exhaustive check: {size} > limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("matroid axiom violated: {0}")]
    AxiomViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
