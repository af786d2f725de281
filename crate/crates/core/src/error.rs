use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Inputs or settings that cannot work together (mismatched tables,
    /// template without placeholder, bad sampling sizes).
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller broke an operation's documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Not enough words in a pool to satisfy a sampling request.
    #[error("insufficient words in {pool}: need {needed}, have {available}")]
    InsufficientPool {
        pool: String,
        needed: usize,
        available: usize,
    },

    /// Input rows that could not be parsed.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// A shipped data asset does not match its pinned checksum.
    #[error("checksum mismatch for {asset}: expected {expected}, found {found}")]
    Checksum {
        asset: String,
        expected: String,
        found: String,
    },
}
