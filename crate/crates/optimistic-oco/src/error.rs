//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    #[error("unbounded objective: zero weight with a nonzero linear term")]
    UnboundedObjective,

    #[error("numerical overflow in loss evaluation")]
    NumericalOverflow,

    #[error("protocol violation: round {got} queried, expected round {expected}")]
    ProtocolViolation { expected: usize, got: usize },

    #[error("no previous distribution available before round 2")]
    NoPreviousDistribution,

    #[error("invalid lower-bound domain: {0}")]
    InvalidLowerBoundDomain(String),

    #[error("root finder failed to bracket after {0} expansions")]
    SolverDivergence(usize),

    #[error("comparator solve failed: projected-gradient norm {0} after iteration cap")]
    ComparatorSolveFailure(f64),

    #[error("conversion precondition violated: {0}")]
    ConversionPrecondition(String),

    #[error("invalid learner/environment pairing: {0}")]
    IncompatibleSetup(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("episode failed (seed {seed}, round {round}): {source}")]
    Episode {
        seed: u64,
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
