use thiserror::Error;

/// Errors raised while building or querying find-smaller indexes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("array is empty")]
    EmptyArray,
    #[error("step between positions {pos} and {} is {step}, at most 1 is allowed", pos + 1)]
    StepBoundViolated { pos: usize, step: u64 },
    #[error("position {pos} is outside 1..={len}")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("block size {0} must be a power of two and at least 2")]
    BadBlockSize(usize),
    #[error("depth must be at least 1")]
    BadDepth,
    #[error("step between offsets {offset} and {} is not +1 or -1", offset + 1)]
    StepNotUnit { offset: usize },
    #[error("block size {0} is too large for a pattern table (max {max})", max = crate::block_table::MAX_BLOCK_SIZE)]
    BlockSizeTooLarge(usize),
    #[error("gap {gap} is outside 1..={max}")]
    GapOutOfRange { gap: i64, max: usize },
    #[error("hop count {hops} exceeds level {level} of node {node}")]
    HopOutOfRange {
        node: usize,
        hops: i64,
        level: usize,
    },
    #[error("node {node} is outside 0..{count}")]
    NodeOutOfRange { node: usize, count: usize },
}
