use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |m - m†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("{name} = {value} is outside the accepted range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("not a valid density operator: {0}")]
    NotAState(String),

    #[error("not a valid channel: {0}")]
    NotAChannel(String),

    #[error("criterion has the same sign at both bracket endpoints ({lo} -> {f_lo:e}, {hi} -> {f_hi:e})")]
    SameSignBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed channel spec: {0}")]
    Spec(String),
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
