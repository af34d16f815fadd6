//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("field shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch { expected: Vec<usize>, got: Vec<usize> },

    #[error("metric degenerate at t={t}, node {node}: min eigenvalue {eigenvalue:e} below floor {floor:e}")]
    DegenerateMetric { t: f64, node: usize, eigenvalue: f64, floor: f64 },

    #[error("non-finite value at t={t}, node {node}")]
    NumericBlowup { t: f64, node: usize },

    #[error("singular metric: min eigenvalue {eigenvalue:e} below floor {floor:e} at node {node}")]
    SingularMetric { node: usize, eigenvalue: f64, floor: f64 },

    #[error("form is not ddbar-exact: {reason} (residual {residual:e})")]
    NotExact { reason: String, residual: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid forcing: {0}")]
    InvalidForcing(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown scenario {name:?}; valid names: {valid:?}")]
    UnknownScenario { name: String, valid: Vec<String> },

    #[error("override out of range: {0}")]
    OverrideOutOfRange(String),

    #[error("output layout collision: {0}")]
    LayoutCollision(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
