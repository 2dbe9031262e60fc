//! Pool fixture files: one JSON object per line.
//!
//! ```text
//! {"address":"0x…","kind":"v2","token0":{…},"token1":{…},"fee_ppm":2500,"reserve0":"…","reserve1":"…"}
//! {"address":"0x…","kind":"v3","token0":{…},"token1":{…},"fee_ppm":500,"liquidity":"…","sqrt_price_x96":"…"}
//! ```

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{AmmError, PoolKind, PoolSet, PoolState};
use crate::model::{Address, Amount, TokenId};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolRecord {
    address: Address,
    kind: String,
    token0: TokenId,
    token1: TokenId,
    fee_ppm: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reserve0: Option<Amount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reserve1: Option<Amount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    liquidity: Option<Amount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sqrt_price_x96: Option<Amount>,
}

impl From<&PoolState> for PoolRecord {
    fn from(p: &PoolState) -> Self {
        let mut r = PoolRecord {
            address: p.address,
            kind: String::new(),
            token0: p.token0.clone(),
            token1: p.token1.clone(),
            fee_ppm: p.fee_ppm,
            reserve0: None,
            reserve1: None,
            liquidity: None,
            sqrt_price_x96: None,
        };
        match &p.kind {
            PoolKind::V2 { reserve0, reserve1 } => {
                r.kind = "v2".into();
                r.reserve0 = Some(Amount(reserve0.clone()));
                r.reserve1 = Some(Amount(reserve1.clone()));
            }
            PoolKind::V3 { liquidity, sqrt_price_x96 } => {
                r.kind = "v3".into();
                r.liquidity = Some(Amount(liquidity.clone()));
                r.sqrt_price_x96 = Some(Amount(sqrt_price_x96.clone()));
            }
        }
        r
    }
}

impl TryFrom<PoolRecord> for PoolState {
    type Error = String;

    fn try_from(r: PoolRecord) -> Result<Self, String> {
        let kind = match r.kind.as_str() {
            "v2" => match (r.reserve0, r.reserve1, r.liquidity.is_none() && r.sqrt_price_x96.is_none()) {
                (Some(a), Some(b), true) => PoolKind::V2 { reserve0: a.0, reserve1: b.0 },
                _ => return Err("v2 pool needs reserve0 and reserve1 only".into()),
            },
            "v3" => match (r.liquidity, r.sqrt_price_x96, r.reserve0.is_none() && r.reserve1.is_none()) {
                (Some(l), Some(s), true) => PoolKind::V3 { liquidity: l.0, sqrt_price_x96: s.0 },
                _ => return Err("v3 pool needs liquidity and sqrt_price_x96 only".into()),
            },
            other => return Err(format!("unknown pool kind {other:?}")),
        };
        let pool = PoolState { address: r.address, token0: r.token0, token1: r.token1, fee_ppm: r.fee_ppm, kind };
        pool.validate().map_err(|e| e.to_string())?;
        Ok(pool)
    }
}

/// Loads and validates a pool fixture. Blank lines are ignored; duplicate addresses are rejected.
pub fn read_pools(reader: impl BufRead) -> Result<PoolSet, AmmError> {
    let mut set = PoolSet::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fail = |message: String| AmmError::Fixture { line: line_no, message };
        let rec: PoolRecord = serde_json::from_str(&line).map_err(|e| fail(e.to_string()))?;
        let pool = PoolState::try_from(rec).map_err(fail)?;
        if set.get(&pool.address).is_ok() {
            return Err(fail(format!("duplicate pool {}", pool.address)));
        }
        set.insert(pool);
    }
    Ok(set)
}

/// Writes pools in address order, one record per line.
pub fn write_pools(pools: &PoolSet, mut out: impl Write) -> Result<(), AmmError> {
    for p in pools.iter() {
        let line = serde_json::to_string(&PoolRecord::from(p)).expect("serializable");
        writeln!(out, "{line}")?;
    }
    Ok(())
}
