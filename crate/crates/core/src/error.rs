use thiserror::Error;

use crate::crypto::BlockHash;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LaceError {
    #[error("unknown block {0}")]
    UnknownBlock(BlockHash),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed block: {0}")]
    Malformed(String),
}
