use thiserror::Error;

/// Unified error type for the scheduling engine and simulator.
#[derive(Debug, Error)]
pub enum LectorError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite value in {context}: {value}")]
    NonFinite { context: &'static str, value: f64 },

    #[error("no decimal number found in response: {0:?}")]
    ParseResponse(String),

    #[error("similarity {value} outside [0, 1] (prompt-compliance failure)")]
    OutOfRange { value: f64 },

    #[error("similarity unavailable for pair ({a}, {b}): {source}")]
    SimilarityUnavailable {
        a: String,
        b: String,
        #[source]
        source: Box<LectorError>,
    },

    #[error("transport failure: {0}")]
    Transport(String),

    #[error("index {index} out of bounds for matrix of size {size}")]
    IndexOutOfBounds { index: usize, size: usize },

    #[error("value iteration did not converge: residual {residual} after {sweeps} sweeps")]
    NonConvergence { residual: f64, sweeps: usize },

    #[error("metric undefined on an empty event log")]
    EmptyLog,

    #[error("duplicate scheduler id in comparison: {0}")]
    DuplicateScheduler(String),

    #[error("scheduler error: {0}")]
    Scheduler(String),

    #[error("concept pool error: {0}")]
    Pool(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LectorError>;
