use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown symbol X{0}")]
    UnknownSymbol(u32),
    #[error("value has {len} letters, more than the cap of {cap}")]
    TooLong { len: u64, cap: u64 },
    #[error("text is empty")]
    EmptyText,
    #[error("pattern is empty")]
    EmptyPattern,
    #[error("pattern needs at least two letters")]
    PatternTooShort,
    #[error("{0}")]
    Param(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid SLP: {0}")]
    Invalid(String),
    #[error("decompressed length {len} exceeds the oracle budget of {budget}")]
    Budget { len: u64, budget: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
