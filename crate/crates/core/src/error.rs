use thiserror::Error;

/// Errors raised by the signal-processing and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("n_samples ({n_samples}) must be at least n_subcarriers ({n_subcarriers})")]
    TooFewSamples {
        n_subcarriers: usize,
        n_samples: usize,
    },
    #[error("n_subcarriers must be positive")]
    NoSubcarriers,
    #[error("bandwidth compression factor {0} is outside (0, 1]")]
    InvalidAlpha(f64),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("cyclic prefix length {cp_len} exceeds symbol length {n_samples}")]
    PrefixTooLong { cp_len: usize, n_samples: usize },
    #[error("odd number of bits ({0}) cannot be mapped onto QPSK symbols")]
    OddBitCount(usize),
    #[error("subcarrier count {0} must be even for pairwise mapping")]
    OddSubcarrierCount(usize),
    #[error("matrix must be {expected}x{expected}, got {rows}x{cols}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("channel has no taps")]
    EmptyChannel,
    #[error("tap delays must be strictly increasing (delay {delay} follows {previous})")]
    NonIncreasingDelay { previous: usize, delay: usize },
    #[error("channel memory ({max_delay} samples) must be shorter than the symbol ({n_samples} samples)")]
    ChannelTooLong { max_delay: usize, n_samples: usize },
    #[error("input of {len} samples is shorter than the channel memory ({required} samples)")]
    InputShorterThanChannel { len: usize, required: usize },
    #[error("cyclic prefix of {cp_len} samples does not cover channel delay {max_delay}")]
    PrefixShorterThanChannel { cp_len: usize, max_delay: usize },
    #[error("zero {what} at subcarrier {index}")]
    ZeroDivisor { what: &'static str, index: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
