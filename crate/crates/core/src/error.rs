use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Mathematical failures that a verification suite is supposed to *observe*
/// (a violated inequality, a diverging energy in a condition check) are
/// reported in a `VerificationReport`, not raised here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point outside the domain: {0}")]
    OutOfDomain(String),

    #[error("bracket does not straddle a root: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    BracketViolation { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("integral diverges: partial value {partial} up to cutoff {cutoff}, tail decay exponent {exponent}")]
    Divergent { partial: f64, cutoff: f64, exponent: f64 },

    #[error("refinement did not converge: {0}")]
    NotConverged(String),

    #[error("degenerate sampling: {0}")]
    Degenerate(String),

    #[error("cannot parse {what} `{input}`: {reason}")]
    Parse { what: &'static str, input: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        Error::Parse { what, input: input.to_string(), reason: reason.into() }
    }
}
