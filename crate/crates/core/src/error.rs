use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("text is empty")]
    EmptyText,
    #[error("text contains the reserved sentinel byte 0x00 at position {0}")]
    SentinelInText(usize),
    #[error("sample rate must be at least 1")]
    ZeroSampleRate,
    #[error("row {row} out of range 1..={max}")]
    RowOutOfRange { row: usize, max: usize },
    #[error("text position {pos} out of range 1..={max}")]
    PositionOutOfRange { pos: usize, max: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed {what}: {reason}")]
    Format { what: &'static str, reason: String },
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("malformed phrase #{index}: {reason}")]
    MalformedPhrase { index: usize, reason: String },
    #[error("unknown rule id {0}")]
    InvalidRule(usize),
    #[error("pair ({left}, {right}) violates AVL balance")]
    Unbalanced { left: usize, right: usize },
    #[error("split position {k} out of range 1..{len}")]
    SplitOutOfRange { k: usize, len: usize },
    #[error("bad pattern boundaries: {0}")]
    BadBoundaries(String),
    #[error("pattern #{0} is empty")]
    EmptyPattern(usize),
    #[error("wildcard pattern has no literal symbols")]
    AllWildcards,
    #[error("worker count must be at least 1")]
    ZeroWorkers,
}

impl Error {
    pub(crate) fn format(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            what,
            reason: reason.into(),
        }
    }
}
