use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("not-a-knot interpolation needs at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("expected {expected} control points, got {got}")]
    PointCountMismatch { expected: usize, got: usize },
    #[error("parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("unsupported derivative order {0}")]
    InvalidOrder(usize),
    #[error("curve speed vanishes at parameter {0}")]
    ZeroSpeed(f64),
    #[error("tube radius {radius} violates r * kappa_max < 1 (kappa_max = {kappa_max})")]
    RadiusTooLarge { radius: f64, kappa_max: f64 },
    #[error("cross-section point ({eta}, {zeta}) outside tube radius {radius}")]
    OutsideTube { eta: f64, zeta: f64, radius: f64 },
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("invalid incident wave: {0}")]
    InvalidWave(String),
    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),
    #[error("invalid sphere grid: {0}")]
    InvalidGrid(String),
    #[error("non-positive contrast parameter: {0}")]
    NonPositiveParameter(String),
    #[error("cross-section is empty at the chosen resolution")]
    EmptyCrossSection,
    #[error("linear solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("node mismatch: {0}")]
    NodeMismatch(String),
    #[error("far field has no samples")]
    MissingSamples,
    #[error("far-field data has zero norm")]
    ZeroDataNorm,
    #[error("observation point {0} too close to the center curve")]
    ObservationTooClose(usize),
    #[error("noise level must be non-negative, got {0}")]
    NegativeNoiseLevel(f64),
    #[error("need at least {needed} points, got {got}")]
    TooFewSeriesPoints { needed: usize, got: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value at line {0}")]
    NonFinite(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
