//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}={value}: must satisfy {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("{func}: argument {value} outside domain {domain}")]
    OutOfDomain {
        func: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("support mismatch: {left} vs {right} atoms")]
    SupportMismatch { left: usize, right: usize },

    #[error("absolute continuity violated at atom {atom}: p={p} > 0 while q=0")]
    AbsoluteContinuity { atom: usize, p: f64 },

    #[error("probabilities must be nonnegative and sum to 1 (sum={sum})")]
    NotADistribution { sum: f64 },

    #[error("explicit redaction index {index} out of bounds for support size {support}")]
    IndexOutOfBounds { index: usize, support: usize },

    #[error("explicit redaction indices contain duplicates (index {index})")]
    DuplicateIndex { index: usize },

    #[error("redaction set is empty")]
    EmptyRedactionSet,

    #[error("no probability mass outside the redaction set")]
    AllMassRedacted,

    #[error("redaction specs must share one variant to be combined")]
    MixedSpecVariants,

    #[error("combined classifier specs must share one threshold (got {left} and {right})")]
    MismatchedThresholds { left: f64, right: f64 },

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("degenerate variance: all samples are equal")]
    DegenerateVariance,

    #[error("degenerate reference range: every point equals {value}")]
    DegenerateRange { value: f64 },

    #[error("discriminator value {value} on massed atom {atom} makes the loss infinite")]
    LogDomain { atom: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("training diverged: non-finite loss at update {step}")]
    TrainingDiverged { step: usize },

    #[error("empty training set after removing redacted samples")]
    EmptyRealSet,

    #[error(
        "no sign change of the stationarity function on ({lo:.6e}, {hi:.6e}]: \
         g(lo)={g_lo:.6e}, g(hi)={g_hi:.6e}"
    )]
    NoRootInBracket { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
