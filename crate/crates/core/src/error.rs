use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("non-finite observation at index {0}")]
    NonFinite(usize),

    #[error("t must lie in [0,1], got {0}")]
    InvalidT(f64),

    #[error("t grid must be nonempty and strictly increasing within [0,1]")]
    InvalidGrid,

    #[error("nonpositive mean")]
    NonPositiveMean,

    #[error("jackknife undefined: each group needs at least 2 observations (got n1={n1}, n2={n2})")]
    JackknifeUndefined { n1: usize, n2: usize },

    #[error("empty constraint vector")]
    EmptyConstraints,

    #[error("statistic must be nonnegative, got {0}")]
    NegativeStatistic(f64),

    #[error("alpha must lie in (0,1), got {0}")]
    InvalidAlpha(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot subsample {requested} observations from a sample of size {available}")]
    SubsampleTooLarge { requested: usize, available: usize },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed delimited input: {0}")]
    Csv(#[from] csv::Error),

    #[error("column {0} not found")]
    MissingColumn(String),

    #[error("no numeric rows retained from {0}")]
    NoRows(PathBuf),

    #[error("log transform undefined: {0} retained row(s) are nonpositive")]
    NonPositiveForLog(usize),
}

pub(crate) fn check_t(t: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&t) {
        Ok(t)
    } else {
        Err(Error::InvalidT(t))
    }
}
