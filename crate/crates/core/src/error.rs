use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("element code {0} does not belong to this field")]
    FieldMismatch(u32),
    #[error("{what} = {value} is out of range {lo}..={hi}")]
    OutOfRange {
        what: &'static str,
        value: u64,
        lo: u64,
        hi: u64,
    },
    #[error("{divisor} does not divide {value}")]
    NotDivisor { divisor: u64, value: u64 },
    #[error("hypothesis failed: {what}{}", witness.as_ref().map(|w| format!(" (witness {w})")).unwrap_or_default())]
    Hypothesis {
        what: String,
        witness: Option<String>,
    },
    #[error("0/0 while evaluating at {0}")]
    Indeterminate(String),
    #[error("degenerate degree-one map (ad = bc)")]
    Degenerate,
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn hypothesis(what: impl Into<String>) -> Self {
        Error::Hypothesis {
            what: what.into(),
            witness: None,
        }
    }

    pub(crate) fn hypothesis_at(what: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::Hypothesis {
            what: what.into(),
            witness: Some(witness.into()),
        }
    }

    pub(crate) fn range(what: &'static str, value: u64, lo: u64, hi: u64) -> Self {
        Error::OutOfRange {
            what,
            value,
            lo,
            hi,
        }
    }
}
