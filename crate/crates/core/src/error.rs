use thiserror::Error;

pub type Result<T, E = HallError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HallError {
    #[error("scalar ring: {0}")]
    Ring(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex `{0}` has exactly one loop; a vertex needs zero loops or at least two")]
    ConditionB(String),

    #[error("the loop-free part of the quiver has a cycle through `{0}`")]
    ConditionA(String),

    #[error("vertex `{vertex}` has charge {charge} but only {available} simples exist over F_{p}")]
    ChargeTooLarge { vertex: String, charge: u64, available: u64, p: u32 },

    #[error("enumeration too large: {0}")]
    EnumerationTooLarge(String),

    #[error("context mismatch: {0}")]
    Mismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("io: {0}")]
    Io(String),
}

impl HallError {
    /// True for errors caused by a configured resource bound.
    pub fn is_bound(&self) -> bool {
        matches!(self, HallError::EnumerationTooLarge(_))
    }
}

impl From<std::io::Error> for HallError {
    fn from(e: std::io::Error) -> Self {
        HallError::Io(e.to_string())
    }
}
