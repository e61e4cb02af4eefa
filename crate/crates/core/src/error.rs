//! Error types shared across the pipeline. Payloads are stored as `f64` so
//! the enums stay independent of the scalar parameter.

use thiserror::Error;

/// Failures evaluating the vector field or one of its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ModelError {
    /// A bubble radius reached zero or below; the model is singular there.
    #[error("non-positive radius r{index}: {value:e}")]
    NonPositiveRadius { index: u8, value: f64 },
    /// The 2x2 acceleration system is numerically singular.
    #[error("singular mass matrix: |det| = {det:e} < {threshold:e}")]
    SingularMassMatrix { det: f64, threshold: f64 },
    /// Physical or dimensionless parameters violate their invariants.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParams {
        name: &'static str,
        reason: &'static str,
    },
}

/// Failures of a Lyapunov-spectrum run.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum LyapunovError {
    #[error("trajectory collapsed after {periods} periods")]
    Collapsed { periods: u32 },
    #[error("step size underflow after {periods} periods")]
    StepUnderflow { periods: u32 },
    #[error("step budget exhausted after {periods} periods")]
    StepLimit { periods: u32 },
    #[error("tangent dynamics produced a non-finite norm")]
    NonFinite,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Failures of Poincaré-section operations.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SectionError {
    #[error("trajectory collapsed while sampling the section")]
    Collapsed,
    #[error("step size underflow while sampling the section")]
    StepUnderflow,
    #[error("step budget exhausted while sampling the section")]
    StepLimit,
    #[error("series too short: {len} samples, need at least {need}")]
    SeriesTooShort { len: usize, need: usize },
    #[error("fingerprints come from different parameter sets")]
    ParamsMismatch,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A spectrum/fingerprint combination that violates the structural rules of
/// the model (e.g. a synchronous state classified hyperchaotic). Signals
/// numerics that are too loose or a genuine anomaly, never silently resolved.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("inconsistent classification: {kind} with synchronous deviation {sync_deviation:e}")]
pub struct InconsistentClassification {
    pub kind: &'static str,
    pub sync_deviation: f64,
}

/// Failures of sweep-level operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("invalid sweep specification: {0}")]
    InvalidSpec(String),
    #[error("seed ensemble must contain a synchronous and an asymmetric seed")]
    BadEnsemble,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lyapunov(#[from] LyapunovError),
    #[error(transparent)]
    Section(#[from] SectionError),
}

/// Configuration-file and preset errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: cannot parse value for `{key}`: {value}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("keys `d` and `d_over_r0` are mutually exclusive")]
    DistanceConflict,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}
