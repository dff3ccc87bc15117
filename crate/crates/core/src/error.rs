use thiserror::Error;

/// Errors raised by the decomposition toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FifError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: String, right: String },

    #[error("expected a {expected}-dimensional signal, got {actual} dimensions")]
    Dimension { expected: usize, actual: usize },

    #[error("spectrum is not conjugate-symmetric: imaginary residue {residue:e} exceeds {tolerance:e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("invalid prototype: {0}")]
    InvalidPrototype(String),

    #[error("filter length {ell} is too short (minimum 2)")]
    FilterTooShort { ell: f64 },

    #[error("filter of {taps} taps does not fit a group axis of order {order}")]
    FilterTooLong { taps: usize, order: usize },

    #[error("filter spectrum has no zero below Nyquist")]
    NoSpectralZero,

    #[error("too few local extrema ({found}) to estimate a filter length")]
    TooFewExtrema { found: usize },

    #[error("signal has zero norm")]
    ZeroSignal,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty decomposition: no IMFs to aggregate")]
    EmptyDecomposition,
}

pub type Result<T> = std::result::Result<T, FifError>;
