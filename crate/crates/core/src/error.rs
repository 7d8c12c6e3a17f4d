use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{what}: {got} exceeds the configured bound {bound}")]
    BoundExceeded {
        what: &'static str,
        bound: usize,
        got: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported name: {0}")]
    UnsupportedName(String),

    #[error("block width {width} at index {index} exceeds the width bound {bound}")]
    WidthBound { index: u64, width: u32, bound: u32 },

    #[error("name is not independent-analyzable: {0}")]
    NotIndependent(String),

    #[error("schedule cannot be classified: {0}")]
    Unclassifiable(String),

    #[error("malformed step sequence: {0}")]
    MalformedSequence(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("the condition p must be non-zero")]
    ZeroCondition,

    #[error("interval partition has {intervals} intervals but {names} names were supplied")]
    LengthMismatch { intervals: usize, names: usize },

    #[error("conditional branch depth {0} exceeds the cap of 4")]
    BranchDepth(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
