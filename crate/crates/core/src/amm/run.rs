use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use super::swap::{permissive_limit, swap_v2_raw, swap_v3};
use super::{AmmError, PoolKind, PoolSet, PoolState};
use crate::model::{Address, Direction, PathDescriptor, PoolType, TokenId};
use crate::num::to_signed;

pub const BP_SCALE: u32 = 10_000;

/// Optional trailing swap that converts the route's last token into the settlement token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalHop {
    pub pool: Address,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunParams {
    pub amount0: BigUint,
    /// Validator share of the surplus, in basis points.
    pub share_ratio_bp: u32,
    pub final_hop: Option<FinalHop>,
    /// V3 price limits by hop index (the final hop is index `n`). Missing entries use the most
    /// permissive limit for the hop's direction.
    pub price_limits: BTreeMap<usize, BigUint>,
}

impl RunParams {
    pub fn new(amount0: impl Into<BigUint>, share_ratio_bp: u32) -> Self {
        RunParams { amount0: amount0.into(), share_ratio_bp, final_hop: None, price_limits: BTreeMap::new() }
    }

    pub fn with_final_hop(mut self, pool: Address, direction: Direction) -> Self {
        self.final_hop = Some(FinalHop { pool, direction });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionResult {
    /// Surplus of the settlement token over its pre-run balance.
    pub delta: BigUint,
    /// `⌊delta · r / 10000⌋`, paid to the share endpoint.
    pub payout: BigUint,
    pub kept: BigUint,
    /// Amount received after each hop, the final normalisation hop included.
    pub hop_amounts: Vec<BigUint>,
    pub settlement_token: TokenId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbortReason {
    /// The settlement balance did not grow; `delta` is the signed change.
    NotProfitable { delta: BigInt },
    /// A V2 hop produced no output.
    Dust { hop: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Executed(ExecutionResult),
    /// The run reverted; no pool was modified.
    Aborted(AbortReason),
}

impl RunOutcome {
    pub fn executed(&self) -> Option<&ExecutionResult> {
        match self {
            RunOutcome::Executed(r) => Some(r),
            RunOutcome::Aborted(_) => None,
        }
    }
}

pub(crate) struct Trial {
    pub touched: BTreeMap<Address, PoolState>,
    pub hop_amounts: Vec<BigUint>,
    pub delta: BigInt,
    pub settlement_token: TokenId,
    pub dust_at: Option<usize>,
}

/// Contract-side token balances during a run.
#[derive(Default)]
struct Balances(BTreeMap<TokenId, BigUint>);

impl Balances {
    fn get(&self, t: &TokenId) -> BigUint {
        self.0.get(t).cloned().unwrap_or_default()
    }

    fn add(&mut self, t: &TokenId, v: &BigUint) {
        *self.0.entry(t.clone()).or_default() += v;
    }

    fn sub(&mut self, t: &TokenId, v: &BigUint) {
        let e = self.0.entry(t.clone()).or_default();
        *e -= v;
    }
}

fn check_descriptor(descriptor: &PathDescriptor, pools: &PoolSet) -> Result<(), AmmError> {
    for i in 0..descriptor.hops() {
        let (t_in, t_out, addr, ty, dir) = descriptor.hop(i);
        let pool = pools.get(&addr)?;
        if pool.pool_type() != ty {
            return Err(AmmError::KindMismatch {
                pool: addr,
                expected: if ty == PoolType::V2 { "v2" } else { "v3" },
            });
        }
        let (pin, pout) = pool.tokens_for(dir);
        if pin != t_in || pout != t_out {
            return Err(AmmError::HopMismatch { hop: i, pool: addr });
        }
    }
    Ok(())
}

/// One swap on a scratch copy of `pool`. Returns `(output, leftover input, new state)`.
fn step(
    pool: &PoolState,
    direction: Direction,
    amount: &BigUint,
    limit: Option<&BigUint>,
) -> Result<(BigUint, BigUint, PoolState), AmmError> {
    match pool.kind {
        PoolKind::V2 { .. } => {
            let (t_in, _) = pool.tokens_for(direction);
            let (out, next) = swap_v2_raw(pool, t_in, amount)?;
            Ok((out, BigUint::zero(), next))
        }
        PoolKind::V3 { .. } => {
            let default_limit;
            let limit = match limit {
                Some(l) => l,
                None => {
                    default_limit = permissive_limit(direction);
                    &default_limit
                }
            };
            let r = swap_v3(pool, direction, amount, limit)?;
            Ok((r.amount_out, r.remainder, r.pool))
        }
    }
}

/// Executes the route on copies of the touched pools and reports the settlement-token delta.
/// Nothing in `pools` is modified.
pub(crate) fn trial(descriptor: &PathDescriptor, pools: &PoolSet, params: &RunParams) -> Result<Trial, AmmError> {
    check_descriptor(descriptor, pools)?;
    if params.amount0.is_zero() {
        return Err(AmmError::ZeroInput(descriptor.pools()[0]));
    }
    let n = descriptor.hops();
    let (final_pool, settlement_token) = match &params.final_hop {
        Some(fh) => {
            let pool = pools.get(&fh.pool)?;
            let (fin, fout) = pool.tokens_for(fh.direction);
            if fin != &descriptor.tokens()[n] {
                return Err(AmmError::HopMismatch { hop: n, pool: fh.pool });
            }
            (Some((fh.pool, fh.direction)), fout.clone())
        }
        None => (None, descriptor.tokens()[n].clone()),
    };

    let mut touched: BTreeMap<Address, PoolState> = BTreeMap::new();
    let mut balances = Balances::default();
    let start = &descriptor.tokens()[0];
    balances.add(start, &params.amount0);
    let pre = balances.get(&settlement_token);

    let mut amount = params.amount0.clone();
    let mut hop_amounts = Vec::with_capacity(n + 1);
    let mut dust_at = None;

    let legs = (0..n)
        .map(|i| {
            let (t_in, t_out, addr, _, dir) = descriptor.hop(i);
            (t_in.clone(), t_out.clone(), addr, dir)
        })
        .chain(final_pool.map(|(addr, dir)| {
            let (a, b) = pools.get(&addr).expect("checked").tokens_for(dir);
            (a.clone(), b.clone(), addr, dir)
        }));

    for (i, (t_in, t_out, addr, dir)) in legs.enumerate() {
        if amount.is_zero() {
            dust_at = Some(i.saturating_sub(1));
            break;
        }
        let current = match touched.get(&addr) {
            Some(p) => p.clone(),
            None => pools.get(&addr)?.clone(),
        };
        balances.sub(&t_in, &amount);
        let (out, leftover, next) = step(&current, dir, &amount, params.price_limits.get(&i))?;
        balances.add(&t_in, &leftover);
        balances.add(&t_out, &out);
        touched.insert(addr, next);
        if out.is_zero() && matches!(current.kind, PoolKind::V2 { .. }) {
            dust_at = Some(i);
        }
        hop_amounts.push(out.clone());
        amount = out;
    }
    let post = balances.get(&settlement_token);
    let delta = to_signed(&post) - to_signed(&pre);
    Ok(Trial { touched, hop_amounts, delta, settlement_token, dust_at })
}

/// Runs the route atomically: either every hop lands and the surplus is split between the share
/// endpoint and the builder, or the run aborts and `pools` is left untouched.
pub fn arbitrage_run(descriptor: &PathDescriptor, pools: &mut PoolSet, params: &RunParams) -> Result<RunOutcome, AmmError> {
    if params.share_ratio_bp > BP_SCALE {
        return Err(AmmError::ShareRatio(params.share_ratio_bp));
    }
    let t = trial(descriptor, pools, params)?;
    if let Some(hop) = t.dust_at {
        return Ok(RunOutcome::Aborted(AbortReason::Dust { hop }));
    }
    if !t.delta.is_positive() {
        return Ok(RunOutcome::Aborted(AbortReason::NotProfitable { delta: t.delta }));
    }
    let delta = t.delta.to_biguint().expect("positive");
    let payout = &delta * params.share_ratio_bp / BP_SCALE;
    let kept = &delta - &payout;
    pools.replace_all(t.touched);
    Ok(RunOutcome::Executed(ExecutionResult {
        delta,
        payout,
        kept,
        hop_amounts: t.hop_amounts,
        settlement_token: t.settlement_token,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amm::swap::swap_v2;
    use crate::amm::AmmError;
    use crate::arb::fixtures::token;

    fn a(n: u64) -> Address {
        Address::from_low_u64(n)
    }

    /// WBNB→USDT→USD1→WBNB over three V2 pools, the first one 5% rich in USDT.
    pub(crate) fn mispriced_triangle() -> (PoolSet, PathDescriptor) {
        let e18 = BigUint::from(10u8).pow(18);
        let (wbnb, usdt, usd1) = (token("WBNB"), token("USDT"), token("USD1"));
        let pools = PoolSet::new([
            PoolState::v2(a(1), wbnb.clone(), usdt.clone(), 2500, &e18 * 1000u32, &e18 * 945_000u32),
            PoolState::v2(a(2), usdt.clone(), usd1.clone(), 100, &e18 * 5_000_000u32, &e18 * 5_000_000u32),
            PoolState::v2(a(3), wbnb.clone(), usd1.clone(), 2500, &e18 * 2000u32, &e18 * 1_800_000u32),
        ]);
        let d = pools.descriptor(&wbnb, &[a(1), a(2), a(3)]).unwrap();
        (pools, d)
    }

    #[test]
    fn share_split_boundaries() {
        let (mut pools, d) = mispriced_triangle();
        let amount = BigUint::from(10u8).pow(18);
        let snapshot = pools.clone();
        let r = arbitrage_run(&d, &mut pools, &RunParams::new(amount.clone(), 0)).unwrap();
        let r = r.executed().unwrap();
        assert!(r.payout.is_zero());
        assert_eq!(r.kept, r.delta);

        let mut pools = snapshot;
        let r = arbitrage_run(&d, &mut pools, &RunParams::new(amount, 2500)).unwrap();
        let r = r.executed().unwrap();
        assert_eq!(r.payout, &r.delta * 2500u32 / 10_000u32);
        assert_eq!(&r.payout + &r.kept, r.delta);
    }

    #[test]
    fn sequential_replay_matches() {
        let (mut pools, d) = mispriced_triangle();
        let replay_pools = pools.clone();
        let amount = BigUint::from(10u8).pow(18) * 3u8;
        let r = arbitrage_run(&d, &mut pools, &RunParams::new(amount.clone(), 1000)).unwrap();
        let r = r.executed().unwrap().clone();

        let mut x = amount.clone();
        let mut outs = Vec::new();
        for i in 0..3 {
            let (t_in, _, addr, _, _) = d.hop(i);
            let (out, _) = swap_v2(replay_pools.get(&addr).unwrap(), t_in, &x).unwrap();
            outs.push(out.clone());
            x = out;
        }
        assert_eq!(r.hop_amounts, outs);
        let delta = x - amount;
        assert_eq!(r.delta, delta);
        assert_eq!(r.kept, &delta - &delta * 1000u32 / 10_000u32);
    }

    #[test]
    fn balanced_pools_abort_and_roll_back() {
        let e18 = BigUint::from(10u8).pow(18);
        let (wbnb, usdt) = (token("WBNB"), token("USDT"));
        let mut pools = PoolSet::new([
            PoolState::v2(a(1), wbnb.clone(), usdt.clone(), 3000, &e18 * 1000u32, &e18 * 1000u32),
            PoolState::v2(a(2), wbnb.clone(), usdt.clone(), 3000, &e18 * 1000u32, &e18 * 1000u32),
        ]);
        let before = pools.clone();
        let d = pools.descriptor(&wbnb, &[a(1), a(2)]).unwrap();
        let out = arbitrage_run(&d, &mut pools, &RunParams::new(e18, 5000)).unwrap();
        assert!(matches!(out, RunOutcome::Aborted(AbortReason::NotProfitable { .. })));
        assert_eq!(pools, before);
    }

    #[test]
    fn share_ratio_out_of_range() {
        let (mut pools, d) = mispriced_triangle();
        assert!(matches!(
            arbitrage_run(&d, &mut pools, &RunParams::new(1u8, 10_001)),
            Err(AmmError::ShareRatio(10_001))
        ));
    }

    #[test]
    fn missing_pool_and_flag_mismatch() {
        let (pools, d) = mispriced_triangle();
        let mut partial = PoolSet::new(pools.iter().filter(|p| p.address != a(2)).cloned());
        assert!(matches!(
            arbitrage_run(&d, &mut partial, &RunParams::new(1u8, 0)),
            Err(AmmError::MissingPool(_))
        ));
        let wrong = PathDescriptor::new(
            d.tokens().to_vec(),
            d.pools().to_vec(),
            vec![PoolType::V3, PoolType::V2, PoolType::V2],
            d.directions().to_vec(),
        )
        .unwrap();
        let mut pools = pools;
        assert!(matches!(
            arbitrage_run(&wrong, &mut pools, &RunParams::new(1u8, 0)),
            Err(AmmError::KindMismatch { .. })
        ));
    }

    #[test]
    fn final_hop_normalises_into_settlement_token() {
        // Route USDT→USD1→USDT' where the last leg lands in USDT, then a final V2 hop to WBNB.
        let e18 = BigUint::from(10u8).pow(18);
        let (wbnb, usdt, usd1) = (token("WBNB"), token("USDT"), token("USD1"));
        let mut pools = PoolSet::new([
            PoolState::v2(a(1), usdt.clone(), usd1.clone(), 100, &e18 * 1_000_000u32, &e18 * 1_030_000u32),
            PoolState::v2(a(2), usd1.clone(), usdt.clone(), 100, &e18 * 1_000_000u32, &e18 * 1_000_000u32),
            PoolState::v2(a(3), usdt.clone(), wbnb.clone(), 2500, &e18 * 900_000u32, &e18 * 1000u32),
        ]);
        let d = pools.descriptor(&usdt, &[a(1), a(2)]).unwrap();
        let params = RunParams::new(&e18 * 1000u32, 1000).with_final_hop(a(3), Direction::ZeroForOne);
        let r = arbitrage_run(&d, &mut pools, &params).unwrap();
        let r = r.executed().unwrap();
        assert_eq!(r.settlement_token, wbnb);
        assert_eq!(r.hop_amounts.len(), 3);
        assert_eq!(r.delta, r.hop_amounts[2]);
    }
}
