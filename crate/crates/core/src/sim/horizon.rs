use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{format_ms, Ms, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "bsc", alias = "bsc_direct")]
    BscDirect,
    #[serde(rename = "eth", alias = "eth_relay")]
    EthRelay,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::BscDirect => "bsc",
            Protocol::EthRelay => "eth",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bsc" | "bsc_direct" | "bscdirect" => Ok(Protocol::BscDirect),
            "eth" | "eth_relay" | "ethrelay" => Ok(Protocol::EthRelay),
            other => Err(format!("unknown protocol {other:?}")),
        }
    }
}

/// Time during which a competing builder can still replace the winning block.
///
/// A relay keeps the auction open until the horizon, so anything arriving after the latency
/// lead still competes. Direct single-round selection accepts the first valid bid, leaving no
/// such window.
pub fn contestable_window(protocol: Protocol, horizon_ms: Ms, delta_lat_ms: Ms) -> Ms {
    match protocol {
        Protocol::BscDirect => Ms::zero(),
        Protocol::EthRelay => (horizon_ms - delta_lat_ms).max(Ms::zero()),
    }
}

/// `h_eth − h_bsc`: coordination time present under the relay and absent under direct selection.
pub fn missing_horizon(h_eth_ms: Ms, h_bsc_ms: Ms) -> Result<Ms, SimError> {
    if h_eth_ms < h_bsc_ms {
        return Err(SimError::HorizonOrder { eth: format_ms(h_eth_ms), bsc: format_ms(h_bsc_ms) });
    }
    Ok(h_eth_ms - h_bsc_ms)
}
