use thiserror::Error;

/// Errors produced by the table builders, evaluators and scans in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("table limit {requested} exceeds the configured capacity of {max}")]
    Capacity { requested: u64, max: u64 },

    #[error("{what} = {value} lies outside the tabulated range [1, {limit}]")]
    Range { what: &'static str, value: f64, limit: u64 },

    #[error("tau_{r}({n}) does not fit in 64 bits")]
    Overflow { n: u64, r: u32 },

    #[error("{n} is not coprime to the modulus {q}")]
    NotCoprime { n: u64, q: u64 },

    #[error("series at sigma = {sigma} needs more terms than the table holds; best certificate {certificate:e}")]
    NonConvergence { sigma: f64, certificate: f64 },

    #[error("tolerance {requested:e} unreachable; best achievable {achievable:e}")]
    ToleranceUnreachable { requested: f64, achievable: f64 },

    #[error("|F(s)| = {0:e} is below the zero floor")]
    ZeroDenominator(f64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("table cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
