use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse element from `{0}`")]
    Parse(String),

    #[error("malformed element `{element}` for {set}")]
    MalformedElement { set: String, element: String },

    #[error("index mismatch: expected {expected}, found {found}")]
    IndexMismatch { expected: String, found: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("witness search exhausted after {budget} samples ({context})")]
    WitnessSearchExhausted { context: String, budget: usize },

    #[error("broken witness: {0}")]
    BrokenWitness(String),

    #[error("extraction failed at level {level}: {source}")]
    Extraction {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("anchor too short: need length >= {needed}, got {got}")]
    AnchorTooShort { needed: usize, got: usize },

    #[error("no certified tail available at tolerance {eps}")]
    TailUnavailable { eps: f64 },

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn at_level(self, level: usize) -> Error {
        Error::Extraction {
            level,
            source: Box::new(self),
        }
    }
}
