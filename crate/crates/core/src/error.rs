use crate::domain::FirmwareType;
use thiserror::Error;

/// Errors surfaced by any stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),
    #[error("duplicate job id: {0}")]
    DuplicateJobId(String),
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("invalid quantile: {0}")]
    InvalidQuantile(f64),
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("missing firmware data: {0}")]
    MissingFirmwareData(FirmwareType),
    #[error("stale data: {0}")]
    StaleData(String),
    #[error("unknown job: {0}")]
    UnknownJob(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("division by zero truth at index {0}")]
    ZeroTruth(usize),
    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
