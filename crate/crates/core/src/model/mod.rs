//! Canonical in-memory representation of traces, tokens, builder labels and path descriptors.

mod codec;
mod label;
mod path;
mod primitives;
mod trace;

pub use codec::{
    parse_trace_file, write_trace_file, write_transaction, ParseError, ParseOptions, ParsedTraces, TraceReader,
};
pub(crate) use codec::Amount;
pub use label::{bsc_builders, BuilderLabel, LabelSet, BSC_BUILDERS_CSV};
pub use path::{Direction, PathDescriptor, PoolType};
pub use primitives::{Address, TokenId, TxHash, MAX_DECIMALS};
pub use trace::{EventBody, EventKind, InternalTxn, Swap, Sync, TraceEvent, Transaction, Transfer};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid hex value {0:?}")]
    InvalidHex(String),
    #[error("{value:?} does not decode to {expected} bytes")]
    InvalidLength { value: String, expected: usize },
    #[error("token decimals {0} exceed 36")]
    Decimals(u8),
    #[error("swap has identical input and output token {0}")]
    SelfSwap(String),
    #[error("event index {next} does not follow {prev}")]
    EventOrder { prev: u32, next: u32 },
    #[error("descriptor lengths inconsistent: {tokens} tokens, {pools} pools, {flags} type flags, {dirs} direction flags")]
    DescriptorLength { tokens: usize, pools: usize, flags: usize, dirs: usize },
    #[error("address {address} labeled twice ({first}, {second})")]
    DuplicateLabel { address: Address, first: String, second: String },
    #[error("label file line {line}: {message}")]
    LabelFile { line: usize, message: String },
}
