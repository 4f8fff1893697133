//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid material `{name}`: reflection coefficient {value} outside [0, 1]")]
    InvalidMaterial { name: String, value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("unsupported reflection order {0} (image method enumerates up to 2)")]
    UnsupportedOrder(usize),

    #[error("unknown rx index {index} (array has {count} elements)")]
    UnknownRxIndex { index: usize, count: usize },

    #[error("invalid radar config: {0}")]
    InvalidRadarConfig(String),

    #[error("tap delay {tau_s} s is outside the unambiguous range [0, {limit_s}) s")]
    OutOfUnambiguousRange { tau_s: f64, limit_s: f64 },

    #[error("invalid array geometry: {0}")]
    InvalidArray(String),

    #[error("invalid spectrum request: {0}")]
    InvalidSpectrum(String),

    #[error("invalid surrogate config: {0}")]
    InvalidSurrogate(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid loss config: {0}")]
    InvalidLossConfig(String),

    #[error("invalid optimizer config: {0}")]
    InvalidOptimizerConfig(String),

    #[error("optimization diverged: {0}")]
    Diverged(String),

    #[error("unknown parameter name `{0}`")]
    UnknownParam(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("scene file error: {0}")]
    SceneFile(String),

    #[error("grid file error: {0}")]
    GridFile(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
