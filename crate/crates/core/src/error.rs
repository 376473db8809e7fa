//! Error type shared by all simulator modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance must contain at least one element")]
    EmptyInstance,

    #[error("element at index {index} is zero; zero elements are rejected")]
    ZeroElement { index: usize },

    #[error("capacity (or a sample grid derived from it) overflows the widest supported integer")]
    CapacityOverflow,

    #[error("machine config field {field} must be strictly positive, got {value}")]
    NonPositiveConfig { field: &'static str, value: f64 },

    #[error("generator resolution {resolution} Hz exceeds generator bandwidth {bandwidth} Hz")]
    ResolutionAboveBandwidth { resolution: f64, bandwidth: f64 },

    #[error("exact counting supports at most {max} elements, instance has {n}")]
    TooManyElements { n: usize, max: usize },

    #[error("brute-force enumeration supports at most {max} elements, instance has {n}")]
    BruteForceTooLarge { n: usize, max: usize },

    #[error("sample count {actual} is below the exact-spectrum rate {required} (2*band+1); result would alias")]
    Aliasing { required: usize, actual: usize },

    #[error("collective state carries no sample buffer; sample it first")]
    NotSampled,

    #[error("signals are defined on different sample grids ({left} vs {right} samples)")]
    GridMismatch { left: usize, right: usize },

    #[error("shift frequency {shift_hz} Hz is not an integer multiple of f0 = {f0_hz} Hz")]
    OffHarmonicShift { shift_hz: f64, f0_hz: f64 },

    #[error("sample count must be at least 1")]
    EmptyGrid,

    #[error(
        "noise power spectral density must be positive and finite, got {value} at {freq_hz} Hz"
    )]
    NonPositivePsd { value: f64, freq_hz: f64 },

    #[error("noise variance must be nonnegative, got {value}")]
    NegativeVariance { value: f64 },

    #[error("Monte-Carlo run count must be at least 1")]
    ZeroRuns,

    #[error("channel bandwidth per memprocessor must be positive, got {value}")]
    NonPositiveBandwidth { value: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid instance file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
