//! Simulated V2/V3 pools and atomic multi-hop arbitrage execution.

mod fixture;
mod pool;
mod run;
mod search;
mod swap;

pub use fixture::{read_pools, write_pools, PoolRecord};
pub use pool::{PoolKind, PoolSet, PoolState, FEE_SCALE};
pub use run::{arbitrage_run, AbortReason, ExecutionResult, FinalHop, RunOutcome, RunParams, BP_SCALE};
pub use search::{best_input_search, best_input_search_with, delta_at};
pub use swap::{max_sqrt_ratio, permissive_limit, q96, swap_v2, swap_v3, V3Swap, MAX_SQRT_RATIO, MIN_SQRT_RATIO};

use num_bigint::BigUint;
use thiserror::Error;

use crate::model::{Address, ModelError};

#[derive(Debug, Error)]
pub enum AmmError {
    #[error("pool {0} not found")]
    MissingPool(Address),
    #[error("pool {pool} is not a {expected} pool")]
    KindMismatch { pool: Address, expected: &'static str },
    #[error("hop {hop}: pool {pool} does not trade the descriptor's token pair in that direction")]
    HopMismatch { hop: usize, pool: Address },
    #[error("zero input into pool {0}")]
    ZeroInput(Address),
    #[error("swap through pool {0} produced no output")]
    Dust(Address),
    #[error("token {token} is not traded by pool {pool}")]
    TokenNotInPool { pool: Address, token: String },
    #[error("price limit {limit} is on the wrong side for pool {pool}")]
    WrongSideLimit { pool: Address, limit: BigUint },
    #[error("pool {0} has no active liquidity")]
    InactivePool(Address),
    #[error("pool {pool} is invalid: {reason}")]
    InvalidPool { pool: Address, reason: String },
    #[error("share ratio {0} bp is above 10000")]
    ShareRatio(u32),
    #[error("search bounds: lo must be below hi")]
    Bounds,
    #[error(transparent)]
    Descriptor(#[from] ModelError),
    #[error("pool fixture line {line}: {message}")]
    Fixture { line: usize, message: String },
    #[error("pool fixture: {0}")]
    Io(#[from] std::io::Error),
}
