//! Scenario files (TOML).
//!
//! ```toml
//! protocol = "bsc"            # or "eth"
//! horizon_ms = 3000           # defaults: 3000 for bsc, 12000 for eth
//! base_compute_ms = 10
//! birth_jitter_ms = 20
//!
//! [proposers]
//! count = 21
//! rotation = "round_robin"
//! listen_window_ms = 50
//! blacklist_slots = 100
//!
//! [relay]                     # eth only
//! delay_ms = 0
//! rebids = true
//! rebid_interval_ms = 250
//!
//! [opportunity]
//! decay = "piecewise"         # or "exponential"
//! knee_ms = 100
//! deadline_ms = 200
//! peak_value = "1000000000000000000"
//! gas_floor = "10000000000000000"
//!
//! [[builders]]
//! id = "alpha"
//! latency_ms = 20
//! strategy = "short_hop"      # short_hop | mixed | long_hop
//! share_ratio_bp = 2500
//! infra_tier = 1
//! non_delivery_prob = 0.0002
//!
//! [pools]                     # optional: peak value from a drifting pool fixture
//! fixture = "pools.jsonl"     # relative to the scenario file
//! start = "WBNB"
//! route = ["0x…", "0x…", "0x…"]
//! drift_bp = 50
//! search_hi = "100000000000000000000"
//! ```

use std::fs;
use std::io::BufReader;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::{de_ms, de_opt_ms, ms, slot_seed, BuilderAgent, Ms, OpportunityModel, Protocol, SimError};
use crate::amm::{best_input_search, read_pools, PoolKind, PoolSet};
use crate::model::{Address, PathDescriptor};

pub const BUILTIN_SCENARIOS: &[(&str, &str)] = &[
    ("bsc_duopoly", include_str!("../../data/scenarios/bsc_duopoly.toml")),
    ("eth_duopoly", include_str!("../../data/scenarios/eth_duopoly.toml")),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timing {
    pub horizon_ms: Ms,
    pub base_compute_ms: Ms,
    /// Opportunity birth is shifted by a uniform integer draw from `0..=birth_jitter_ms`.
    pub birth_jitter_ms: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProposerConfig {
    pub count: u32,
    pub rotation: String,
    #[serde(deserialize_with = "de_ms")]
    pub listen_window_ms: Ms,
    pub blacklist_slots: u64,
}

impl Default for ProposerConfig {
    fn default() -> Self {
        ProposerConfig { count: 1, rotation: "round_robin".into(), listen_window_ms: ms(50), blacklist_slots: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelayConfig {
    #[serde(deserialize_with = "de_ms")]
    pub delay_ms: Ms,
    pub rebids: bool,
    #[serde(deserialize_with = "de_ms")]
    pub rebid_interval_ms: Ms,
}

impl Default for RelayConfig {
    fn default() -> Self {
        RelayConfig { delay_ms: ms(0), rebids: true, rebid_interval_ms: ms(250) }
    }
}

/// Opportunity value derived per slot from an arbitrage search over drifting pools.
#[derive(Debug, Clone)]
pub struct Embodied {
    pub pools: PoolSet,
    pub descriptor: PathDescriptor,
    pub drift_bp: u32,
    pub search_lo: BigUint,
    pub search_hi: BigUint,
}

impl Embodied {
    /// Best achievable surplus for the slot after perturbing the first pool on the route by a
    /// uniform draw in `±drift_bp`.
    pub fn peak_for(&self, seed: u64, height: u64) -> Result<u128, SimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(slot_seed(seed, height) ^ 0x706f_6f6c_7300_0000);
        let d = rng.random_range(-i64::from(self.drift_bp)..=i64::from(self.drift_bp));
        let factor = u64::try_from(10_000 + d).expect("drift below 100%");
        let mut pools = self.pools.clone();
        let first = self.descriptor.pools()[0];
        let mut pool = pools.get(&first)?.clone();
        pool.kind = match pool.kind {
            PoolKind::V2 { reserve0, reserve1 } => PoolKind::V2 { reserve0: reserve0 * factor / 10_000u32, reserve1 },
            PoolKind::V3 { liquidity, sqrt_price_x96 } => {
                PoolKind::V3 { liquidity, sqrt_price_x96: sqrt_price_x96 * factor / 10_000u32 }
            }
        };
        pools.insert(pool);
        let (_, delta) = best_input_search(&self.descriptor, &pools, &self.search_lo, &self.search_hi)?;
        Ok(delta.max(BigInt::ZERO).to_u128().unwrap_or(u128::MAX))
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub protocol: Protocol,
    pub timing: Timing,
    pub proposers: ProposerConfig,
    pub relay: RelayConfig,
    pub opportunity: OpportunityModel,
    pub builders: Vec<BuilderAgent>,
    pub embodied: Option<Embodied>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    protocol: Protocol,
    #[serde(default, deserialize_with = "de_opt_ms")]
    horizon_ms: Option<Ms>,
    #[serde(default = "default_compute", deserialize_with = "de_ms")]
    base_compute_ms: Ms,
    #[serde(default)]
    birth_jitter_ms: u32,
    #[serde(default)]
    proposers: ProposerConfig,
    #[serde(default)]
    relay: RelayConfig,
    #[serde(default)]
    opportunity: OpportunityModel,
    #[serde(default)]
    builders: Vec<BuilderAgent>,
    pools: Option<RawPools>,
}

fn default_compute() -> Ms {
    ms(10)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPools {
    fixture: String,
    start: String,
    route: Vec<Address>,
    #[serde(default)]
    drift_bp: u32,
    #[serde(default = "default_lo")]
    search_lo: String,
    search_hi: String,
}

fn default_lo() -> String {
    "1".into()
}

impl Scenario {
    /// Parses and validates a scenario. A pool fixture path is resolved against `base_dir`.
    pub fn from_toml(text: &str, name: &str, base_dir: Option<&Path>) -> Result<Self, SimError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| SimError::Parse(e.to_string()))?;
        let horizon_ms = raw.horizon_ms.unwrap_or(match raw.protocol {
            Protocol::BscDirect => ms(3000),
            Protocol::EthRelay => ms(12000),
        });
        let mut bad = Vec::new();
        if raw.builders.is_empty() {
            bad.push("builders".to_string());
        }
        if raw.proposers.count == 0 {
            bad.push("proposers.count".into());
        }
        if raw.proposers.rotation != "round_robin" {
            bad.push("proposers.rotation".into());
        }
        if raw.proposers.listen_window_ms < ms(0) {
            bad.push("proposers.listen_window_ms".into());
        }
        if raw.relay.delay_ms < ms(0) {
            bad.push("relay.delay_ms".into());
        }
        if raw.relay.rebids && raw.relay.rebid_interval_ms <= ms(0) {
            bad.push("relay.rebid_interval_ms".into());
        }
        if horizon_ms <= ms(0) {
            bad.push("horizon_ms".into());
        }
        if raw.base_compute_ms < ms(0) {
            bad.push("base_compute_ms".into());
        }
        bad.extend(raw.opportunity.validate("opportunity."));
        let mut ids = std::collections::BTreeSet::new();
        for (i, b) in raw.builders.iter().enumerate() {
            bad.extend(b.validate(&format!("builders[{i}].")));
            if !ids.insert(b.id.clone()) {
                bad.push(format!("builders[{i}].id"));
            }
        }

        let embodied = match raw.pools {
            None => None,
            Some(p) => match load_embodied(p, base_dir) {
                Ok(e) => Some(e),
                Err(keys) => {
                    bad.extend(keys);
                    None
                }
            },
        };
        if !bad.is_empty() {
            return Err(SimError::Config(bad));
        }
        Ok(Scenario {
            name: name.to_string(),
            protocol: raw.protocol,
            timing: Timing { horizon_ms, base_compute_ms: raw.base_compute_ms, birth_jitter_ms: raw.birth_jitter_ms },
            proposers: raw.proposers,
            relay: raw.relay,
            opportunity: raw.opportunity,
            builders: raw.builders,
            embodied,
        })
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = fs::read_to_string(path).map_err(|source| SimError::Io { path: path.display().to_string(), source })?;
        let name = path.file_stem().map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned());
        Self::from_toml(&text, &name, path.parent())
    }

    pub fn builtin(name: &str) -> Option<Self> {
        BUILTIN_SCENARIOS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(n, text)| Self::from_toml(text, n, None).expect("bundled scenario is valid"))
    }

    /// A bundled scenario name, or else a path to a scenario file.
    pub fn resolve(name_or_path: &str) -> Result<Self, SimError> {
        match Self::builtin(name_or_path) {
            Some(s) => Ok(s),
            None => Self::load(Path::new(name_or_path)),
        }
    }
}

fn load_embodied(p: RawPools, base_dir: Option<&Path>) -> Result<Embodied, Vec<String>> {
    let path = base_dir.map_or_else(|| Path::new(&p.fixture).to_path_buf(), |d| d.join(&p.fixture));
    let file = fs::File::open(&path).map_err(|_| vec!["pools.fixture".to_string()])?;
    let pools = read_pools(BufReader::new(file)).map_err(|_| vec!["pools.fixture".to_string()])?;
    let start = pools
        .iter()
        .flat_map(|x| [&x.token0, &x.token1])
        .find(|t| t.symbol == p.start)
        .cloned()
        .ok_or_else(|| vec!["pools.start".to_string()])?;
    let descriptor = pools.descriptor(&start, &p.route).map_err(|_| vec!["pools.route".to_string()])?;
    let mut bad = Vec::new();
    if p.drift_bp >= 10_000 {
        bad.push("pools.drift_bp".to_string());
    }
    let lo = p.search_lo.parse::<BigUint>().map_err(|_| vec!["pools.search_lo".to_string()])?;
    let hi = p.search_hi.parse::<BigUint>().map_err(|_| vec!["pools.search_hi".to_string()])?;
    if lo >= hi {
        bad.push("pools.search_hi".to_string());
    }
    if !bad.is_empty() {
        return Err(bad);
    }
    Ok(Embodied { pools, descriptor, drift_bp: p.drift_bp, search_lo: lo, search_hi: hi })
}
