//! Run configuration (TOML).
//!
//! ```toml
//! share_addresses = ["0xfffffffffffffffffffffffffffffffffffffffe"]
//! k_hops = 4
//! alpha = 0.05
//! seed = 42
//!
//! [price_table]
//! WBNB = "891.78"
//! USDT = 1
//!
//! [risk]                 # optional overrides: [freezable, custodial, external_chain]
//! FDUSD = [1, 1, 0]
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Deserializer};

use super::CliError;
use crate::analytics::{default_risk_table, DEFAULT_ALPHA};
use crate::arb::{PriceTable, ShareAddresses, DEFAULT_FLOW_HOPS};
use crate::model::Address;
use crate::num::parse_decimal;

/// Reference WBNB price in dollars.
pub const WBNB_USD: &str = "891.78";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub share_addresses: Vec<Address>,
    pub price_table: BTreeMap<String, BigRational>,
    pub k_hops: u32,
    pub alpha: f64,
    pub scenario_path: Option<PathBuf>,
    pub seed: u64,
    pub risk: BTreeMap<String, [bool; 3]>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut prices: BTreeMap<String, BigRational> =
            PriceTable::with_stablecoins().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let wbnb = parse_decimal(WBNB_USD).expect("constant");
        prices.insert("WBNB".into(), wbnb.clone());
        prices.insert("BNB".into(), wbnb);
        RunConfig {
            share_addresses: vec![Address::VALIDATOR_INCOME],
            price_table: prices,
            k_hops: DEFAULT_FLOW_HOPS,
            alpha: DEFAULT_ALPHA,
            scenario_path: None,
            seed: 0,
            risk: default_risk_table().iter().map(|&(s, a, b, c)| (s.to_string(), [a, b, c])).collect(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Decimal {
    Int(i64),
    Float(f64),
    Text(String),
}

fn de_prices<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BTreeMap<String, BigRational>>, D::Error> {
    let raw = BTreeMap::<String, Decimal>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| {
            let text = match v {
                Decimal::Int(i) => i.to_string(),
                Decimal::Float(f) => f.to_string(),
                Decimal::Text(s) => s,
            };
            parse_decimal(&text).map(|p| (k, p)).map_err(serde::de::Error::custom)
        })
        .collect::<Result<_, _>>()
        .map(Some)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    share_addresses: Option<Vec<Address>>,
    #[serde(default, deserialize_with = "de_prices")]
    price_table: Option<BTreeMap<String, BigRational>>,
    k_hops: Option<u32>,
    alpha: Option<f64>,
    scenario_path: Option<PathBuf>,
    seed: Option<u64>,
    #[serde(default)]
    risk: BTreeMap<String, [u8; 3]>,
}

impl RunConfig {
    /// Parses a config. Missing keys keep their defaults; `price_table` entries extend the
    /// default table.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut cfg = RunConfig::default();
        let mut bad = Vec::new();
        if let Some(a) = raw.share_addresses {
            cfg.share_addresses = a;
        }
        if let Some(p) = raw.price_table {
            for (k, v) in p {
                if !v.is_positive() {
                    bad.push(format!("price_table.{k}"));
                }
                cfg.price_table.insert(k, v);
            }
        }
        if let Some(k) = raw.k_hops {
            cfg.k_hops = k;
        }
        if let Some(a) = raw.alpha {
            if !(a > 0.0 && a < 1.0) {
                bad.push("alpha".into());
            }
            cfg.alpha = a;
        }
        cfg.scenario_path = raw.scenario_path;
        if let Some(s) = raw.seed {
            cfg.seed = s;
        }
        for (sym, bits) in raw.risk {
            if bits.iter().any(|&b| b > 1) {
                bad.push(format!("risk.{sym}"));
            }
            cfg.risk.insert(sym, bits.map(|b| b == 1));
        }
        if !bad.is_empty() {
            return Err(CliError::Config(format!("invalid values for {}", bad.join(", "))));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn prices(&self) -> PriceTable {
        let mut t = PriceTable::new();
        for (k, v) in &self.price_table {
            t.insert(k.clone(), v.clone());
        }
        t
    }

    pub fn share_set(&self) -> ShareAddresses {
        ShareAddresses::new(self.share_addresses.iter().copied())
    }
}
