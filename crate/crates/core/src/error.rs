use std::path::PathBuf;

use crate::workloads::SubsampleDiagnostics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("insufficient keys for gaps: need at least 2, got {0}")]
    InsufficientKeys(usize),

    #[error("empty key set")]
    EmptyKeySet,

    #[error("keys are not strictly increasing at index {index}")]
    NotStrictlyIncreasing { index: usize },

    #[error("invalid access distribution: {0}")]
    InvalidDistribution(String),

    #[error("bin count must be at least 1")]
    ZeroBins,

    #[error("block factor must be at least 1")]
    ZeroBlockFactor,

    #[error("fanout must be at least 2, got {0}")]
    BadFanout(usize),

    #[error("unknown dictionary `{given}`; valid ids: {valid}")]
    UnknownDictionary { given: String, valid: String },

    #[error("length mismatch: keys have {keys} entries, distribution has {dist}")]
    LengthMismatch { keys: usize, dist: usize },

    #[error("truncated at offset {offset}")]
    Truncated { offset: u64 },

    #[error("count mismatch: header declares {declared} keys, trailing bytes start at offset {offset}")]
    CountMismatch { declared: u64, offset: u64 },

    #[error("cannot draw {n} distinct keys from a universe of size {universe}")]
    UniverseTooSmall { n: u64, universe: u64 },

    #[error("universe saturated: no absent keys available for failure queries")]
    UniverseSaturated,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("all {} subsample trials rejected by the KS test (best KS {:.4e}, critical {:.4e})", .0.trials, .0.best_ks, .0.ks_critical)]
    AllTrialsRejected(Box<SubsampleDiagnostics>),

    #[error("exact forest over {n} keys exceeds the guard of {limit}; use approx mode")]
    ForestTooLarge { n: usize, limit: usize },

    #[error("oracle divergence at op {op_index}: {detail}")]
    OracleDivergence { op_index: usize, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
