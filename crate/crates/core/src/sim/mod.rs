//! Deterministic discrete-event simulation of block auctions: direct single-round selection and
//! relay-mediated commit–reveal, driven by a latency race over a decaying opportunity.

mod agent;
mod campaign;
mod horizon;
mod opportunity;
mod queue;
mod scenario;
mod slot;

pub use agent::{BuilderAgent, Strategy};
pub use campaign::{run_campaign, write_slot_log, write_summary, Campaign, Summary, SummaryRow};
pub use horizon::{contestable_window, missing_horizon, Protocol};
pub use opportunity::{Decay, OpportunityModel};
pub use queue::EventQueue;
pub use scenario::{Embodied, ProposerConfig, RelayConfig, Scenario, Timing, BUILTIN_SCENARIOS};
pub use slot::{run_slot_bsc, run_slot_eth, slot_seed, Bid, Blacklist, SlotEnv, SlotOutcome};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer};
use thiserror::Error;

use crate::amm::AmmError;
use crate::num::{format_rational, parse_decimal};

/// Simulation time in milliseconds, exact.
pub type Ms = Ratio<i64>;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("H_ETH {eth} ms is below H_BSC {bsc} ms")]
    HorizonOrder { eth: String, bsc: String },
    #[error("scenario file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Amm(#[from] AmmError),
}

pub fn ms(v: i64) -> Ms {
    Ms::from_integer(v)
}

pub fn ms_to_rational(v: Ms) -> BigRational {
    BigRational::new(BigInt::from(*v.numer()), BigInt::from(*v.denom()))
}

pub fn format_ms(v: Ms) -> String {
    format_rational(&ms_to_rational(v))
}

fn rational_to_ms(r: &BigRational) -> Option<Ms> {
    Some(Ms::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

/// Parses `12`, `12.5` or `"12.5"`.
pub fn parse_ms(s: &str) -> Result<Ms, String> {
    let r = parse_decimal(s).map_err(|e| e.to_string())?;
    rational_to_ms(&r).ok_or_else(|| format!("{s} ms is out of range"))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumRepr {
    Int(i64),
    Float(f64),
    Text(String),
}

pub(crate) fn de_ms<'de, D: Deserializer<'de>>(d: D) -> Result<Ms, D::Error> {
    match NumRepr::deserialize(d)? {
        NumRepr::Int(v) => Ok(ms(v)),
        NumRepr::Float(v) => parse_ms(&v.to_string()).map_err(serde::de::Error::custom),
        NumRepr::Text(s) => parse_ms(&s).map_err(serde::de::Error::custom),
    }
}

pub(crate) fn de_opt_ms<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Ms>, D::Error> {
    de_ms(d).map(Some)
}

pub(crate) fn de_u128<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
    match NumRepr::deserialize(d)? {
        NumRepr::Int(v) => u128::try_from(v).map_err(serde::de::Error::custom),
        NumRepr::Float(v) => Err(serde::de::Error::custom(format!("expected an integer, got {v}"))),
        NumRepr::Text(s) => s.trim().parse().map_err(serde::de::Error::custom),
    }
}
