use thiserror::Error;

use crate::pairing::SuiteError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error("seed must not be empty")]
    EmptySeed,
    #[error("identity must not be empty")]
    EmptyIdentity,
    #[error("{tag} takes {expected}")]
    HashArity { tag: &'static str, expected: &'static str },
    #[error("{0} must be nonzero")]
    ZeroScalar(&'static str),
    #[error("threshold t = {t} is invalid for group size n = {n}")]
    InvalidThreshold { t: usize, n: usize },
    #[error("group size n = {n} must be smaller than the group order")]
    GroupTooLarge { n: usize },
    #[error("party index {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("no share from dealer {0}")]
    MissingDealer(usize),
    #[error("dealer {0} contributed more than one share")]
    DuplicateDealer(usize),
    #[error("share addressed to party {got}, expected party {expected}")]
    RecipientMismatch { expected: usize, got: usize },
    #[error("index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("index {0} is zero modulo the group order")]
    ZeroIndex(usize),
    #[error("delegation signature rejected")]
    WarrantRejected,
    #[error("malformed warrant: {0}")]
    MalformedWarrant(String),
    #[error("no contribution from signer {0}")]
    MissingMember(usize),
    #[error("partial signature from signer {0} failed the clerk check")]
    RejectedPartial(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
