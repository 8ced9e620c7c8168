use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Every failure the numerical core can report.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A construction or operation received parameters outside its domain.
    InvalidArgument(String),
    /// A size cap (vertex count, dense dimension) would be exceeded.
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    /// A factorization met a pivot that is zero to working precision.
    Breakdown { lambda: f64 },
    /// A linear system could not be solved (singular or inconsistent).
    Unsolvable(String),
    /// A spectral query fell outside the range where the spectrum is known.
    OutOfRange { query: f64, cap: f64 },
    /// The decimation enumeration disagreed with the dense oracle.
    GateFailure(String),
    /// Not enough data (grid span, decades, periods) for a fit or fold.
    InsufficientData(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::CapExceeded { what, requested, cap } => {
                write!(f, "{what} cap exceeded: requested {requested}, cap {cap}")
            }
            Error::Breakdown { lambda } => {
                write!(f, "factorization breakdown at lambda = {lambda:e}")
            }
            Error::Unsolvable(msg) => write!(f, "unsolvable system: {msg}"),
            Error::OutOfRange { query, cap } => {
                write!(f, "query {query:e} above spectrum cap {cap:e}")
            }
            Error::GateFailure(msg) => write!(f, "decimation gate failed: {msg}"),
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
