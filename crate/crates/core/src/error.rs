use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulator and harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A standing parameter assumption is violated; the payload names the constraint.
    #[error("{0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("unknown override key `{0}`")]
    UnknownOverride(String),

    #[error("instability at t = {t}: {field} norm {norm:.3e} exceeds 1e6 x its initial value")]
    Instability { t: f64, field: &'static str, norm: f64 },

    #[error("boundary mass fraction {fraction:.3e} at t = {t} exceeds threshold {threshold:.1e}")]
    BoundaryMass { t: f64, fraction: f64, threshold: f64 },

    #[error("need ≥3 resolutions")]
    NeedThreeResolutions,

    #[error("time steps must be strictly decreasing")]
    UnorderedResolutions,

    #[error("degenerate soliton denominator beta − (c·theta + alpha)² = {0:.3e}")]
    DegenerateSoliton(f64),

    #[error("solitary wave refused: {0}")]
    SolitonRefused(String),

    #[error("soliton residual {0:.3e} exceeds 1e-8")]
    SolitonResidual(f64),

    #[error("claim branch mismatched to sign(α)")]
    BranchMismatch,

    #[error("not enough samples: {0}")]
    NotEnoughSamples(String),

    #[error("snapshot mismatch: {0}")]
    Snapshot(String),

    #[error("run directory {path}: {msg}")]
    RunDir { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
