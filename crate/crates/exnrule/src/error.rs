use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by dataset handling, classifiers and metrics.
#[derive(Debug, Error)]
pub enum Error {
    /// An empty or NaN cell was found while loading a CSV file.
    #[error("missing value: {0}")]
    MissingValue(String),

    /// A label cell held something other than 0 or 1.
    #[error("non-binary label: {0}")]
    NonBinaryLabel(String),

    /// The CSV file is structurally malformed.
    #[error("parse error: {0}")]
    ParseError(String),

    /// A dataset violates a structural invariant (shape, finiteness).
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    /// The requested train/test split cannot be realized.
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    /// The feature-subset size is outside [1, p].
    #[error("invalid feature-subset size {p_prime} for p = {p}")]
    InvalidSubsetSize { p_prime: usize, p: usize },

    /// Two vectors that must agree in length do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A nearest-neighbour search was given no candidates.
    #[error("empty candidate pool")]
    EmptyPool,

    /// A classifier configuration is inconsistent with the training data.
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    /// Training data holds a single class; a vote can never flip.
    #[error("training data contains a single class")]
    SingleClassTraining,

    /// A neighbour chain ran out of candidates before reaching k hops.
    #[error("chain exhausted: requested {requested} hops from a pool of {pool}")]
    ChainExhausted { requested: usize, pool: usize },

    /// Prediction and truth vectors differ in length.
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    /// A probability fell outside [0, 1].
    #[error("probability out of range: {0}")]
    ProbOutOfRange(f64),

    /// Cross-validation folds cannot satisfy their class requirements.
    #[error("degenerate folds: {0}")]
    DegenerateFolds(String),

    /// An unrecognized metric name.
    #[error("unknown metric: {0}")]
    UnknownMetric(String),

    /// An unrecognized synthetic scenario id.
    #[error("unknown scenario: {0}")]
    UnknownScenario(String),

    /// A model document cannot be decoded or does not match the data.
    #[error("model document error: {0}")]
    ModelDocument(String),
}
