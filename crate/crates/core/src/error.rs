//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("root has no parents")]
    RootHasNoParents,

    #[error("vertex not in graph: {0}")]
    UnknownVertex(String),

    #[error("vertex not in truncation: {0}")]
    NotInTruncation(String),

    #[error("no seeds")]
    NoSeeds,

    #[error("seeds must share a level")]
    MixedSeedLevels,

    #[error("edge ({child} -> {parent}) has multiplicity {m} > 1; link operations require multiplicity-free graphs")]
    MultiplicityAboveOne {
        child: String,
        parent: String,
        m: String,
    },

    #[error("kappa-dimension irrational at {0}; only kdim_sq is available there, downstream weight operations are unavailable")]
    IrrationalKappaDim(String),

    #[error("link is invalid: {0}")]
    InvalidLink(String),

    #[error("not a probability distribution: {0}")]
    NotAProbability(String),

    #[error("harmonic system invalid: {0}")]
    InvalidHarmonic(String),

    #[error("value at {vertex} is not in Z/dim ({detail})")]
    DenominatorConstraint { vertex: String, detail: String },

    #[error("level {level} exceeds stored depth {depth}")]
    LevelBeyondDepth { level: usize, depth: usize },

    #[error("group element must be a positive rational, got {0}")]
    NonPositiveGroupElement(String),

    #[error("{0} is not an integer power of the base")]
    NotAPowerOfBase(String),

    #[error("q must be a positive rational different from 1, got {0}")]
    BadQParam(String),

    #[error("signatures have incompatible lengths: {0} and {1}")]
    SignatureLengthMismatch(usize, usize),

    #[error("pair does not interlace: {0} and {1}")]
    NotInterlacing(String, String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
