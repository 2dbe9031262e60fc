//! Trace analytics and proposer–builder market simulation for builder-driven AMM arbitrage.
//!
//! * [`model`]: traces, tokens, builder labels, path descriptors and the trace file format.
//! * [`arb`]: arbitrage-cycle extraction, profit attribution, USD normalisation, flow tracing.
//! * [`amm`]: simulated V2/V3 pools and atomic multi-hop arbitrage execution.
//! * [`sim`]: discrete-event simulation of direct and relay-mediated block auctions.
//! * [`analytics`]: market share, profit matrices, trend tests and related statistics.
//! * [`cli`]: configuration, record files and the command implementations behind the binary.

pub mod model;
pub mod num;
pub mod arb;
pub mod amm;
pub mod sim;
pub mod analytics;
pub mod cli;
