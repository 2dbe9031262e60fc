//! Arbitrage-cycle extraction, profit attribution, USD normalisation and flow tracing.

mod cycle;
pub mod fixtures;
mod flows;
mod profit;

pub use cycle::{extract_arbitrage_cycle, ArbitrageCycle, Hop};
pub use flows::{trace_flows, AddressCategory, FlowEdge, FlowGraph, TxStore, DEFAULT_FLOW_HOPS};
pub use profit::{
    amount_to_usd, attribute_profit, gas_to_base_units, to_usd, PriceTable, ProfitBreakdown, ShareAddresses,
    NATIVE_SYMBOLS,
};

use thiserror::Error;

use crate::model::TxHash;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArbError {
    #[error("cycle belongs to {cycle}, not transaction {tx}")]
    CycleMismatch { tx: TxHash, cycle: TxHash },
    #[error("no USD price for {0}")]
    MissingPrice(String),
}
