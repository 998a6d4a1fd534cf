use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Text input that does not follow the `PDA`/`PLC` formats.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Structurally broken grid: wrong shape, bad symbol ids, oversize.
    #[error("malformed grid: {0}")]
    Malformed(String),

    /// Columns disagree on their star count, so `Z` is undefined.
    #[error("column {first} has {first_stars} stars but column {second} has {second_stars}")]
    NonUniformStars {
        first: usize,
        first_stars: usize,
        second: usize,
        second_stars: usize,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("value overflows the supported range: {0}")]
    Overflow(String),

    #[error("invalid user ordering: {0}")]
    InvalidOrdering(String),

    /// A term needed for XOR cancellation was not in the decoding user's cache.
    #[error("signal {signal}: user {user} cannot cancel the term for row {row} (not cached)")]
    Decode { signal: u32, user: usize, row: usize },

    /// No signal carries a packet the user needs.
    #[error("no signal delivers row {row} to user {user}")]
    Undeliverable { user: usize, row: usize },
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}
