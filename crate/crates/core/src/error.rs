use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("word lengths differ: {0} vs {1}")]
    LengthMismatch(u32, u32),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("minimum distance is undefined for a code with {0} word(s)")]
    DistanceUndefined(usize),

    #[error("duplicate word {0}")]
    DuplicateWord(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("enumeration budget exceeded: {needed} items > budget {budget}")]
    BudgetExceeded { needed: String, budget: u64 },

    #[error("precondition violated: {0}")]
    Guard(String),

    #[error("comparison against {rule} at n={n} is indeterminate at the enclosure precision")]
    Indeterminate { rule: String, n: u32 },
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
