//! Seeded synthetic fixtures. Every generator is a pure function of its seed and count, and each
//! output directory gets a `manifest.json` with the parameters and planted ground truth.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::records::{ArbitrageRecord, RecordWriter, UNKNOWN_BRAND};
use super::{create_dir, create_file, CliError, RunConfig};
use crate::amm::{q96, write_pools, PoolSet, PoolState};
use crate::arb::fixtures::token;
use crate::arb::amount_to_usd;
use crate::model::{
    bsc_builders, write_trace_file, Address, EventBody, InternalTxn, Swap, Sync, TokenId, TraceEvent, Transaction,
    Transfer, TxHash,
};
use crate::num::to_signed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FixtureKind {
    Traces,
    Pools,
    Records,
    Scenario,
}

impl FixtureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FixtureKind::Traces => "traces",
            FixtureKind::Pools => "pools",
            FixtureKind::Records => "records",
            FixtureKind::Scenario => "scenario",
        }
    }

    pub fn default_count(self) -> usize {
        match self {
            FixtureKind::Traces | FixtureKind::Records => 1000,
            FixtureKind::Pools => 12,
            FixtureKind::Scenario => 3,
        }
    }
}

impl FromStr for FixtureKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "traces" => FixtureKind::Traces,
            "pools" => FixtureKind::Pools,
            "records" => FixtureKind::Records,
            "scenario" => FixtureKind::Scenario,
            other => {
                return Err(CliError::Usage(format!("unknown fixture kind {other:?}; expected traces, pools, records or scenario")))
            }
        })
    }
}

const SYMBOLS: [&str; 7] = ["WBNB", "USDT", "USDC", "USD1", "BTCB", "ETH", "CAKE"];
/// Cycles start from tokens the default price table covers: the first `PRICED` symbols.
const PRICED: usize = 4;
const START_TS: i64 = 1_764_115_200;
const START_BLOCK: u64 = 64_000_000;
const WEI: u128 = 1_000_000_000_000_000_000;

/// Ground truth for one planted cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlantedCycle {
    pub tx_hash: String,
    pub builder_brand: String,
    pub base_token: String,
    pub hop_count: usize,
    pub path: String,
    pub gross: String,
    pub share: String,
    pub gas: String,
    pub net: String,
}

fn tokens() -> Vec<TokenId> {
    SYMBOLS.iter().map(|s| token(s)).collect()
}

fn tx_hash(rng: &mut ChaCha8Rng) -> TxHash {
    let mut b = [0u8; 32];
    rng.fill_bytes(&mut b);
    TxHash(b)
}

fn random_address(rng: &mut ChaCha8Rng) -> Address {
    let mut b = [0u8; 20];
    rng.fill_bytes(&mut b);
    b[0] = 0x5e;
    Address(b)
}

fn amount(rng: &mut ChaCha8Rng, lo: u128, hi: u128) -> BigUint {
    BigUint::from(rng.random_range(lo..hi))
}

/// Initiators: every labelled builder address plus two unlabelled senders.
fn initiators(rng: &mut ChaCha8Rng) -> Vec<(Address, String)> {
    let mut out: Vec<(Address, String)> = bsc_builders().iter().map(|l| (l.address, l.brand.clone())).collect();
    out.push((random_address(rng), UNKNOWN_BRAND.into()));
    out.push((random_address(rng), UNKNOWN_BRAND.into()));
    out
}

/// Token route of `hops` legs starting and ending at `base`, with no leg swapping a token for itself.
fn route(rng: &mut ChaCha8Rng, toks: &[TokenId], base: usize, hops: usize) -> Vec<usize> {
    let mut r = vec![base];
    for i in 1..hops {
        let prev = r[i - 1];
        let last_leg = i == hops - 1;
        let choices: Vec<usize> = (0..toks.len()).filter(|&t| t != prev && !(last_leg && t == base)).collect();
        r.push(choices[rng.random_range(0..choices.len())]);
    }
    r.push(base);
    r
}

fn swap_event(pool: Address, a: &TokenId, b: &TokenId, amount_in: BigUint, amount_out: BigUint) -> EventBody {
    EventBody::Swap(Swap { pool, token_in: a.clone(), token_out: b.clone(), amount_in, amount_out, to: None, pool_sink: false, routed: None })
}

fn noise(rng: &mut ChaCha8Rng, toks: &[TokenId], pools: &[Address]) -> EventBody {
    match rng.random_range(0..3) {
        0 => EventBody::Sync(Sync { pool: pools.first().copied() }),
        1 => EventBody::InternalTxn(InternalTxn { from: None, to: random_address(rng), amount: amount(rng, 1, WEI) }),
        _ => EventBody::Transfer(Transfer {
            from: None,
            to: random_address(rng),
            amount: amount(rng, 1, WEI),
            token: Some(toks[rng.random_range(0..toks.len())].clone()),
            pool_sink: false,
        }),
    }
}

/// Inserts each extra event at a random position, keeping the relative order of `main`.
fn interleave(rng: &mut ChaCha8Rng, main: Vec<EventBody>, extra: Vec<EventBody>) -> Vec<TraceEvent> {
    let mut out = main;
    for e in extra {
        let at = rng.random_range(0..=out.len());
        out.insert(at, e);
    }
    out.into_iter().enumerate().map(|(i, body)| TraceEvent { index: i as u32, body }).collect()
}

/// Plants `count` transactions, about three in five of them arbitrage cycles of 2 to 8 hops.
///
/// Cycles carry interleaved syncs, internal transfers and unrelated token transfers. Their share
/// is split between a transfer to the validator income address and, sometimes, a pool-sink
/// deposit. Only WBNB-based cycles pay a gas price, so their gas in base units equals the wei
/// cost under the default prices.
pub fn generate_traces(seed: u64, count: usize) -> (Vec<Transaction>, Vec<PlantedCycle>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let toks = tokens();
    let senders = initiators(&mut rng);
    let mut txs = Vec::with_capacity(count);
    let mut planted = Vec::new();
    for i in 0..count {
        let hash = tx_hash(&mut rng);
        let (initiator, brand) = senders[rng.random_range(0..senders.len())].clone();
        let block = START_BLOCK + i as u64 / 3;
        let ts = START_TS + i as i64 * 600 + rng.random_range(0..600);
        let mut extra: Vec<EventBody> = Vec::new();
        let mut main: Vec<EventBody> = Vec::new();
        let (mut gas_used, mut gas_price) = (amount(&mut rng, 100_000, 600_000), BigUint::ZERO);

        if rng.random_bool(0.6) {
            let base = rng.random_range(0..PRICED);
            let hops = rng.random_range(2..=8);
            let r = route(&mut rng, &toks, base, hops);
            let pools: Vec<Address> = (0..hops).map(|_| random_address(&mut rng)).collect();
            let first_in = amount(&mut rng, WEI, 1000 * WEI);
            let gross = amount(&mut rng, WEI / 1000, WEI);
            let mut a_in = first_in.clone();
            for h in 0..hops {
                let a_out = if h == hops - 1 { &first_in + &gross } else { amount(&mut rng, WEI, 1000 * WEI) };
                main.push(swap_event(pools[h], &toks[r[h]], &toks[r[h + 1]], a_in, a_out.clone()));
                a_in = a_out;
            }
            let share_bp = rng.random_range(0..=5000u32);
            let share = &gross * share_bp / 10_000u32;
            let sink = if rng.random_bool(0.3) { &share / 3u32 } else { BigUint::ZERO };
            let direct = &share - &sink;
            if direct > BigUint::ZERO {
                extra.push(EventBody::Transfer(Transfer {
                    from: None,
                    to: Address::VALIDATOR_INCOME,
                    amount: direct,
                    token: Some(toks[base].clone()),
                    pool_sink: false,
                }));
            }
            if sink > BigUint::ZERO {
                let other = (base + 1) % toks.len();
                extra.push(EventBody::Swap(Swap {
                    pool: pools[0],
                    token_in: toks[base].clone(),
                    token_out: toks[other].clone(),
                    amount_in: sink.clone(),
                    amount_out: BigUint::ZERO,
                    to: None,
                    pool_sink: true,
                    routed: Some(sink),
                }));
            }
            for _ in 0..rng.random_range(0..4) {
                extra.push(noise(&mut rng, &toks, &pools));
            }
            let gas = if toks[base].symbol == "WBNB" {
                gas_price = amount(&mut rng, 50_000_000, 3_000_000_000);
                &gas_used * &gas_price
            } else {
                BigUint::ZERO
            };
            let net = to_signed(&gross) - to_signed(&share) - to_signed(&gas);
            planted.push(PlantedCycle {
                tx_hash: hash.to_string(),
                builder_brand: brand,
                base_token: toks[base].symbol.clone(),
                hop_count: hops,
                path: r.iter().map(|&t| toks[t].symbol.as_str()).collect::<Vec<_>>().join("->"),
                gross: gross.to_string(),
                share: share.to_string(),
                gas: gas.to_string(),
                net: net.to_string(),
            });
        } else {
            let pools: Vec<Address> = (0..3).map(|_| random_address(&mut rng)).collect();
            match rng.random_range(0..3) {
                // Plain transfers.
                0 => {}
                // One-way swap.
                1 => main.push(swap_event(pools[0], &toks[0], &toks[1], amount(&mut rng, 1, WEI), amount(&mut rng, 1, WEI))),
                // Two chained legs that do not return to the entry token.
                _ => {
                    main.push(swap_event(pools[0], &toks[1], &toks[0], amount(&mut rng, 1, WEI), amount(&mut rng, 1, WEI)));
                    main.push(swap_event(pools[1], &toks[0], &toks[2], amount(&mut rng, 1, WEI), amount(&mut rng, 1, WEI)));
                }
            }
            for _ in 0..rng.random_range(1..4) {
                extra.push(noise(&mut rng, &toks, &pools));
            }
            gas_used = amount(&mut rng, 21_000, 100_000);
        }
        let events = interleave(&mut rng, main, extra);
        let tx = Transaction::new(hash, block, initiator, events, gas_used, gas_price)
            .expect("generated transaction is well formed")
            .with_timestamp(ts);
        txs.push(tx);
    }
    (txs, planted)
}

/// `count` valid pools over the reference tokens, alternating V2 and V3.
pub fn generate_pools(seed: u64, count: usize) -> PoolSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let toks = tokens();
    let fees = [100u32, 500, 2500, 3000, 10_000];
    let mut pools = Vec::with_capacity(count);
    for i in 0..count {
        let a = rng.random_range(0..toks.len());
        let b = (a + rng.random_range(1..toks.len())) % toks.len();
        let address = Address::from_low_u64(0x9000_0000 + i as u64);
        let fee = fees[rng.random_range(0..fees.len())];
        pools.push(if i % 2 == 0 {
            PoolState::v2(
                address,
                toks[a].clone(),
                toks[b].clone(),
                fee,
                amount(&mut rng, 1000 * WEI, 1_000_000 * WEI),
                amount(&mut rng, 1000 * WEI, 1_000_000 * WEI),
            )
        } else {
            let k = rng.random_range(500u32..2000);
            PoolState::v3(address, toks[a].clone(), toks[b].clone(), fee, amount(&mut rng, 100 * WEI, 100_000 * WEI), q96() * k / 1000u32)
        });
    }
    PoolSet::new(pools)
}

/// Balanced records with USD columns priced from `config`.
pub fn generate_records(seed: u64, count: usize, config: &RunConfig) -> Vec<ArbitrageRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let toks = tokens();
    let prices = config.prices();
    let brands: Vec<String> = {
        let mut b: Vec<String> = bsc_builders().iter().map(|l| l.brand.clone()).collect();
        b.dedup();
        b.push(UNKNOWN_BRAND.into());
        b
    };
    let usd = |v: &BigInt, t: &TokenId| amount_to_usd(v, t, &prices).unwrap_or_else(|_| BigRational::from_integer(0.into()));
    (0..count)
        .map(|i| {
            let base = rng.random_range(0..PRICED);
            let hops = rng.random_range(2..=8);
            let r = route(&mut rng, &toks, base, hops);
            let gross = amount(&mut rng, WEI / 1000, WEI);
            let share = &gross * rng.random_range(0..=5000u32) / 10_000u32;
            let gas = if base == 0 { amount(&mut rng, 0, WEI / 10_000) } else { BigUint::ZERO };
            let net = to_signed(&gross) - to_signed(&share) - to_signed(&gas);
            let t = &toks[base];
            ArbitrageRecord {
                tx_hash: tx_hash(&mut rng),
                block_number: START_BLOCK + i as u64,
                builder_brand: brands[rng.random_range(0..brands.len())].clone(),
                base_token: t.symbol.clone(),
                hop_count: hops,
                path: r.iter().map(|&x| toks[x].symbol.as_str()).collect::<Vec<_>>().join("->"),
                usd_value: usd(&net, t),
                share_usd: usd(&to_signed(&share), t),
                gas_usd: usd(&to_signed(&gas), t),
                gross: to_signed(&gross),
                share,
                gas,
                net,
                timestamp: Some(START_TS + i as i64 * 600 + rng.random_range(0..600)),
            }
        })
        .collect()
}

/// A BSC scenario with `builders` random builders and a mispriced three-pool triangle as the
/// opportunity source. Returns the scenario TOML and the pool fixture it references.
pub fn generate_scenario(seed: u64, builders: usize) -> (String, PoolSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (wbnb, usdt, usdc) = (token("WBNB"), token("USDT"), token("USDC"));
    let price = 890u128 + rng.random_range(0..10);
    let skew = rng.random_range(10_050u128..10_300);
    let p = |i: u64| Address::from_low_u64(0xa000_0000 + i);
    let pools = PoolSet::new([
        PoolState::v2(p(1), wbnb.clone(), usdt.clone(), 2500, BigUint::from(10_000 * WEI), BigUint::from(10_000 * price * WEI)),
        PoolState::v2(p(2), usdt, usdc.clone(), 100, BigUint::from(5_000_000 * WEI), BigUint::from(5_000_000 * WEI)),
        PoolState::v2(
            p(3),
            usdc,
            wbnb,
            2500,
            BigUint::from(10_000 * price * WEI),
            BigUint::from(10_000 * WEI * skew / 10_000),
        ),
    ]);
    let mut toml = String::from(
        "protocol = \"bsc\"\nhorizon_ms = 3000\nbase_compute_ms = 10\nbirth_jitter_ms = 20\n\n\
         [proposers]\ncount = 21\nlisten_window_ms = 50\nblacklist_slots = 100\n\n\
         [opportunity]\ndecay = \"piecewise\"\nknee_ms = 100\ndeadline_ms = 200\ngas_floor = \"10000000000000000\"\n\n",
    );
    toml.push_str(&format!(
        "[pools]\nfixture = \"pools.jsonl\"\nstart = \"WBNB\"\nroute = [\"{}\", \"{}\", \"{}\"]\ndrift_bp = 50\nsearch_hi = \"{}\"\n",
        p(1),
        p(2),
        p(3),
        100 * WEI
    ));
    let strategies = ["short_hop", "mixed", "long_hop"];
    for b in 0..builders.max(1) {
        toml.push_str(&format!(
            "\n[[builders]]\nid = \"b{b}\"\nlatency_ms = {}\nstrategy = \"{}\"\nshare_ratio_bp = {}\ninfra_tier = {}\nnon_delivery_prob = 0.001\n",
            rng.random_range(5..150),
            strategies[rng.random_range(0..strategies.len())],
            rng.random_range(0..=50) * 100,
            rng.random_range(1..=3),
        ));
    }
    (toml, pools)
}

fn write_manifest(dir: &Path, value: serde_json::Value) -> Result<PathBuf, CliError> {
    let path = dir.join("manifest.json");
    let mut f = create_file(&path)?;
    serde_json::to_writer_pretty(&mut f, &value).map_err(|e| CliError::io(&path, e.into()))?;
    std::io::Write::write_all(&mut f, b"\n").map_err(|e| CliError::io(&path, e))?;
    std::io::Write::flush(&mut f).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Writes one kind of fixture into `out_dir` and returns the files written.
pub fn cmd_gen_fixtures(kind: FixtureKind, seed: u64, count: Option<usize>, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    create_dir(out_dir)?;
    let count = count.unwrap_or_else(|| kind.default_count());
    let mut files = Vec::new();
    let mut manifest = json!({ "kind": kind.as_str(), "seed": seed, "count": count });
    match kind {
        FixtureKind::Traces => {
            let (txs, planted) = generate_traces(seed, count);
            let path = out_dir.join("traces.jsonl");
            write_trace_file(create_file(&path)?, &txs).map_err(|e| CliError::io(&path, e))?;
            manifest["planted_cycles"] = json!(planted.len());
            manifest["cycles"] = serde_json::to_value(&planted).expect("plain data");
            files.push(path);
        }
        FixtureKind::Pools => {
            let path = out_dir.join("pools.jsonl");
            write_pools(&generate_pools(seed, count), create_file(&path)?)?;
            files.push(path);
        }
        FixtureKind::Records => {
            let cfg = RunConfig::default();
            let path = out_dir.join("records.csv");
            let mut w = RecordWriter::new(create_file(&path)?)?;
            for r in generate_records(seed, count, &cfg) {
                w.write(&r)?;
            }
            w.finish()?;
            files.push(path);
        }
        FixtureKind::Scenario => {
            let (toml, pools) = generate_scenario(seed, count);
            let path = out_dir.join("scenario.toml");
            std::fs::write(&path, toml).map_err(|e| CliError::io(&path, e))?;
            let pools_path = out_dir.join("pools.jsonl");
            write_pools(&pools, create_file(&pools_path)?)?;
            manifest["builders"] = json!(count.max(1));
            files.push(path);
            files.push(pools_path);
        }
    }
    files.push(write_manifest(out_dir, manifest)?);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arb::{attribute_profit, extract_arbitrage_cycle};
    use crate::sim::Scenario;

    #[test]
    fn planted_cycles_are_recovered() {
        let (txs, planted) = generate_traces(7, 400);
        let cfg = RunConfig::default();
        let (shares, prices) = (cfg.share_set(), cfg.prices());
        let mut found = Vec::new();
        for tx in &txs {
            if let Some(c) = extract_arbitrage_cycle(tx) {
                let b = attribute_profit(tx, &c, &shares, &prices).unwrap();
                found.push((tx.hash.to_string(), c.render_path(), b.gross.to_string(), b.share.to_string(), b.gas_in_base.to_string(), b.net.to_string()));
            }
        }
        let want: Vec<_> =
            planted.iter().map(|p| (p.tx_hash.clone(), p.path.clone(), p.gross.clone(), p.share.clone(), p.gas.clone(), p.net.clone())).collect();
        assert_eq!(found, want);
        assert!(planted.len() > 150);
        assert!(planted.iter().any(|p| p.gas != "0"));
    }

    #[test]
    fn pools_validate() {
        for p in generate_pools(3, 40).iter() {
            p.validate().unwrap();
        }
    }

    #[test]
    fn records_balance() {
        assert!(generate_records(5, 200, &RunConfig::default()).iter().all(ArbitrageRecord::is_balanced));
    }

    #[test]
    fn scenario_loads_and_is_profitable() {
        let dir = tempfile::tempdir().unwrap();
        cmd_gen_fixtures(FixtureKind::Scenario, 11, Some(3), dir.path()).unwrap();
        let sc = Scenario::load(&dir.path().join("scenario.toml")).unwrap();
        assert_eq!(sc.builders.len(), 3);
        assert!(sc.embodied.unwrap().peak_for(11, 0).unwrap() > 0);
    }

    #[test]
    fn same_seed_same_bytes() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        for kind in [FixtureKind::Traces, FixtureKind::Pools, FixtureKind::Records, FixtureKind::Scenario] {
            let fa = cmd_gen_fixtures(kind, 9, Some(20), a.path()).unwrap();
            let fb = cmd_gen_fixtures(kind, 9, Some(20), b.path()).unwrap();
            for (x, y) in fa.iter().zip(&fb) {
                assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
            }
        }
    }

    #[test]
    fn unknown_kind() {
        assert!(matches!("blocks".parse::<FixtureKind>(), Err(CliError::Usage(_))));
    }
}
