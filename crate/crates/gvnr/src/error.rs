//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty document: a bag-of-words with no positive counts has no context vector")]
    EmptyDocument,

    #[error("word index {index} out of vocabulary (size {vocab_size})")]
    OutOfVocabulary { index: usize, vocab_size: usize },

    #[error("non-finite loss at epoch {epoch}; try a lower learning rate")]
    NonFiniteLoss { epoch: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
