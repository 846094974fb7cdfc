use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("node id {0} out of range")]
    NodeOutOfRange(usize),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("partition does not cover node {0}")]
    PartitionMissingNode(usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("modularity is undefined for a graph without edges")]
    NoEdges,

    #[error("empty or sub-minimal trace `{0}`")]
    EmptyTrace(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot sample {requested} distinct users from a network of {available}")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("training data has a single class (positives: {positives}, negatives: {negatives})")]
    SingleClass { positives: usize, negatives: usize },

    #[error("class too small to stratify into {folds} folds (positives: {positives}, negatives: {negatives})")]
    StratificationTooSmall {
        folds: usize,
        positives: usize,
        negatives: usize,
    },

    #[error("need at least {required} memes to compute percentiles, got {got}")]
    TooFewMemes { required: usize, got: usize },

    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("generation failed: {0}")]
    Generation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
