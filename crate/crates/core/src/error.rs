use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bit source exhausted: index {index} requested, {available} bits available")]
    SourceExhausted { index: u64, available: u64 },

    #[error("cannot read bit file {path}: {source}")]
    FileRead {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bit file {path} is too short: {requested} bits requested, {available} available")]
    FileTooShort {
        path: PathBuf,
        requested: u64,
        available: u64,
    },

    #[error("invalid character {found:?} at byte {offset} of ASCII bit file {path}")]
    BadAsciiBit {
        path: PathBuf,
        found: char,
        offset: usize,
    },

    #[error("pairing index overflows u64 for (k, j) = ({k}, {j})")]
    PairingOverflow { k: u64, j: u64 },

    #[error("empty bit string")]
    EmptyBits,

    #[error("precision must be between 1 and {max} bits, got {got}")]
    Precision { got: u32, max: u32 },

    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),

    #[error("normal sequence holds {available} variates, {required} required")]
    InsufficientVariates { required: u64, available: u64 },

    #[error("coefficient sequence {0} has no tail bound")]
    MissingTailBound(String),

    #[error("contraction needs a finite supremum, got {0}")]
    BadSupremum(f64),

    #[error("iteration cap of {cap} terms reached while searching block {block}")]
    IterationCap { block: usize, cap: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("block k = {k} needs {terms} terms, above the cap of {cap}")]
    ResourceGuard { k: u32, terms: u64, cap: u64 },

    #[error("grid is not strictly increasing inside [0, 1] at position {0}")]
    BadGrid(usize),

    #[error("path has no sample at t = {0}")]
    MissingGridPoint(f64),

    #[error("path has {samples} samples, at least {required} needed")]
    PathTooSparse { samples: usize, required: usize },
}
