use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("generator tables differ")]
    TableMismatch,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A recursion or identity that must hold by construction failed.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
    #[error("sign calibration failure: {0}")]
    Calibration(String),
}

impl Error {
    /// True for errors that indicate a defect in the engine rather than bad
    /// caller input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InternalConsistency(_) | Error::Calibration(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
