use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A division that must be exact was not. Inside Witt or ghost solving
    /// this indicates a bug, not bad input.
    #[error("integrity error in {context}: non-exact division, offending term {term}")]
    Integrity { context: String, term: String },
    /// A ghost vector that has no Witt preimage; `index` is the first failing coordinate.
    #[error("not in the image of the ghost map: coordinate {index} is not integral")]
    NotInImage { index: usize },
    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error("missing image for generator {0}")]
    MissingImage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("verification failure in {check}: witness {witness}")]
    Verification { check: String, witness: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
