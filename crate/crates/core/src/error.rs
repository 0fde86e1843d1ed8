use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    BadInput,
    CapExceeded,
    Hypothesis,
    Invariant,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("polynomial has no real root greater than 1")]
    NoRootAboveOne,
    #[error("digit count m = {m} does not exceed beta ~ {beta:.6}")]
    DigitCountTooSmall { m: u32, beta: f64 },
    #[error("reducible polynomial: {0}")]
    Reducible(String),
    #[error("degree {0} exceeds the supported maximum of 10")]
    DegreeTooLarge(usize),
    #[error("undecidable: {0}")]
    Undecidable(String),
    #[error("point lies outside the admissible interval [0, (m-1)/(beta-1)]")]
    OutsideInterval,
    #[error("{what} cap of {cap} exceeded")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
    #[error("point hits a partition point at level {0}; coding is ambiguous")]
    PartitionPoint(usize),
    #[error("inadmissible word: {0}")]
    Inadmissible(String),
    #[error("regression needs at least 3 levels, got {0}")]
    DegenerateRegression(usize),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::BadInput(_)
            | Error::NoRootAboveOne
            | Error::DigitCountTooSmall { .. }
            | Error::Reducible(_)
            | Error::DegreeTooLarge(_)
            | Error::Undecidable(_)
            | Error::OutsideInterval
            | Error::PartitionPoint(_)
            | Error::Inadmissible(_)
            | Error::DegenerateRegression(_) => ErrorKind::BadInput,
            Error::CapExceeded { .. } => ErrorKind::CapExceeded,
            Error::Hypothesis(_) => ErrorKind::Hypothesis,
            Error::Invariant(_) => ErrorKind::Invariant,
        }
    }
}
