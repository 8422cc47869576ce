use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("block length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("bit value {value} at position {index} is not binary")]
    NonBinary { index: usize, value: u8 },

    #[error("index set invalid: {0}")]
    InvalidIndexSet(String),

    #[error("probability {value} outside {range}")]
    ProbabilityOutOfRange { value: f64, range: &'static str },

    #[error("high-entropy set of {alpha} plus {crc_len} CRC bits exceeds block size {n}")]
    NoInformationPositions { alpha: usize, crc_len: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("candidate list is empty")]
    EmptyCandidates,

    #[error("leakage ledger violated: charged {charged} bits, expected n - k = {expected}")]
    LeakageInvariant { charged: usize, expected: usize },

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed file at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("unsupported format version {found} (reader supports {supported})")]
    Version { found: String, supported: &'static str },

    #[error("checksum mismatch: stored {stored}, computed {computed}")]
    Checksum { stored: String, computed: String },
}

impl Error {
    /// Whether the failure originated in reading or writing a file.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_) | Error::Format { .. } | Error::Version { .. } | Error::Checksum { .. }
        )
    }
}
