use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;

use super::{ArbError, ArbitrageCycle};
use crate::model::{Address, EventBody, TokenId, Transaction};
use crate::num::{floor_u, int, pow10, to_signed};

/// Symbols tried, in order, when pricing the native gas token.
pub const NATIVE_SYMBOLS: [&str; 2] = ["BNB", "WBNB"];
pub const NATIVE_DECIMALS: u32 = 18;

/// Fixed USD reference prices keyed by token symbol.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PriceTable {
    prices: BTreeMap<String, BigRational>,
}

impl PriceTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// USDT, USDC, USD1, BUSD and DAI at one dollar.
    pub fn with_stablecoins() -> Self {
        let mut t = Self::new();
        for s in ["USDT", "USDC", "USD1", "BUSD", "DAI"] {
            t.insert(s, int(1));
        }
        t
    }

    pub fn insert(&mut self, symbol: impl Into<String>, usd: BigRational) {
        self.prices.insert(symbol.into(), usd);
    }

    pub fn get(&self, symbol: &str) -> Result<&BigRational, ArbError> {
        self.prices.get(symbol).ok_or_else(|| ArbError::MissingPrice(symbol.to_string()))
    }

    pub fn native(&self) -> Result<&BigRational, ArbError> {
        NATIVE_SYMBOLS
            .iter()
            .find_map(|s| self.prices.get(*s))
            .ok_or_else(|| ArbError::MissingPrice(NATIVE_SYMBOLS[0].to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BigRational)> {
        self.prices.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// Where an arbitrage's proceeds went. `gross`, `share`, `gas_in_base` and `net` are base units
/// of `base_token`; `gas_cost` is in wei.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfitBreakdown {
    pub base_token: TokenId,
    pub gross: BigInt,
    pub share: BigUint,
    pub gas_cost: BigUint,
    pub gas_in_base: BigUint,
    pub net: BigInt,
}

impl ProfitBreakdown {
    /// `net + share + gas_in_base == gross`.
    pub fn is_balanced(&self) -> bool {
        &self.net + to_signed(&self.share) + to_signed(&self.gas_in_base) == self.gross
    }
}

/// Share-profit endpoints: the validator-income address plus any configured system addresses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareAddresses(BTreeSet<Address>);

impl Default for ShareAddresses {
    fn default() -> Self {
        ShareAddresses([Address::VALIDATOR_INCOME].into_iter().collect())
    }
}

impl ShareAddresses {
    pub fn new(addrs: impl IntoIterator<Item = Address>) -> Self {
        ShareAddresses(addrs.into_iter().collect())
    }

    pub fn contains(&self, a: &Address) -> bool {
        self.0.contains(a)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Address> {
        self.0.iter()
    }
}

/// Converts a wei gas cost into base units of `base` through the USD price table.
pub fn gas_to_base_units(gas_cost: &BigUint, base: &TokenId, prices: &PriceTable) -> Result<BigUint, ArbError> {
    if gas_cost.is_zero() {
        return Ok(BigUint::zero());
    }
    let usd = BigRational::new(to_signed(gas_cost), pow10(NATIVE_DECIMALS)) * prices.native()?;
    let base_price = prices.get(&base.symbol)?;
    if base_price.is_zero() {
        return Err(ArbError::MissingPrice(base.symbol.clone()));
    }
    Ok(floor_u(&(usd / base_price * int(pow10(u32::from(base.decimals))))))
}

/// Splits an arbitrage's gross profit into validator share, gas and builder-retained net.
///
/// Share is the sum of transfers to `share_addresses` plus every amount routed into a pool by a
/// pool-sink event.
pub fn attribute_profit(
    tx: &Transaction,
    cycle: &ArbitrageCycle,
    share_addresses: &ShareAddresses,
    prices: &PriceTable,
) -> Result<ProfitBreakdown, ArbError> {
    if tx.hash != cycle.tx_hash {
        return Err(ArbError::CycleMismatch { tx: tx.hash, cycle: cycle.tx_hash });
    }
    let (first, last) = match (cycle.path.first(), cycle.path.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(ArbError::CycleMismatch { tx: tx.hash, cycle: cycle.tx_hash }),
    };
    let gross = to_signed(&last.amount_out) - to_signed(&first.amount_in);

    let mut share = BigUint::zero();
    for event in &tx.events {
        match &event.body {
            EventBody::Transfer(t) if share_addresses.contains(&t.to) || t.pool_sink => share += &t.amount,
            EventBody::Swap(s) if s.pool_sink => share += s.routed_amount(),
            _ => {}
        }
    }

    let gas_cost = tx.gas_cost();
    let gas_in_base = gas_to_base_units(&gas_cost, &cycle.base_token, prices)?;
    let net = &gross - to_signed(&share) - to_signed(&gas_in_base);
    Ok(ProfitBreakdown { base_token: cycle.base_token.clone(), gross, share, gas_cost, gas_in_base, net })
}

/// Values an amount of `token` base units in dollars.
pub fn amount_to_usd(amount: &BigInt, token: &TokenId, prices: &PriceTable) -> Result<BigRational, ArbError> {
    let price = prices.get(&token.symbol)?;
    Ok(BigRational::new(amount.clone(), pow10(u32::from(token.decimals))) * price)
}

/// Builder-retained net profit in dollars.
pub fn to_usd(breakdown: &ProfitBreakdown, prices: &PriceTable) -> Result<BigRational, ArbError> {
    amount_to_usd(&breakdown.net, &breakdown.base_token, prices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arb::extract_arbitrage_cycle;
    use crate::arb::fixtures::{worked_trace, token};
    use crate::model::{Swap, TraceEvent, Transfer, TxHash};
    use crate::num::{parse_decimal, ratio};

    fn wbnb_prices() -> PriceTable {
        let mut p = PriceTable::with_stablecoins();
        p.insert("WBNB", parse_decimal("891.78").unwrap());
        p
    }

    #[test]
    fn worked_breakdown() {
        let tx = worked_trace();
        let cycle = extract_arbitrage_cycle(&tx).unwrap();
        let b = attribute_profit(&tx, &cycle, &ShareAddresses::default(), &PriceTable::new()).unwrap();
        assert_eq!(b.gross, BigInt::from(3040));
        assert_eq!(b.share, BigUint::from(820u32));
        assert_eq!(b.net, BigInt::from(2220));
        assert!(b.gas_cost.is_zero());
        assert!(b.is_balanced());
    }

    #[test]
    fn mismatched_cycle_rejected() {
        let tx = worked_trace();
        let mut cycle = extract_arbitrage_cycle(&tx).unwrap();
        cycle.tx_hash = TxHash::from_low_u64(99);
        assert!(matches!(
            attribute_profit(&tx, &cycle, &ShareAddresses::default(), &PriceTable::new()),
            Err(ArbError::CycleMismatch { .. })
        ));
    }

    fn two_hop(amount_in: u64, amount_out: u64, extra: Vec<TraceEvent>) -> Transaction {
        let (a, b) = (token("USDT"), token("WBNB"));
        let leg = |i, x: &TokenId, y: &TokenId, ai: u64, ao: u64| TraceEvent {
            index: i,
            body: EventBody::Swap(Swap {
                pool: Address::from_low_u64(100 + u64::from(i)),
                token_in: x.clone(),
                token_out: y.clone(),
                amount_in: ai.into(),
                amount_out: ao.into(),
                to: None,
                pool_sink: false,
                routed: None,
            }),
        };
        let mut events = vec![leg(0, &a, &b, amount_in, 77), leg(1, &b, &a, 77, amount_out)];
        events.extend(extra);
        Transaction::new(TxHash::from_low_u64(5), 1, Address::from_low_u64(1), events, 0u8.into(), 0u8.into()).unwrap()
    }

    fn transfer(i: u32, to: Address, amt: u64, pool_sink: bool) -> TraceEvent {
        TraceEvent {
            index: i,
            body: EventBody::Transfer(Transfer { from: None, to, amount: amt.into(), token: None, pool_sink }),
        }
    }

    #[test]
    fn zero_profit_identity() {
        let tx = two_hop(1000, 1000, vec![]);
        let cycle = extract_arbitrage_cycle(&tx).unwrap();
        let b = attribute_profit(&tx, &cycle, &ShareAddresses::default(), &PriceTable::new()).unwrap();
        assert!(b.gross.is_zero() && b.share.is_zero() && b.net.is_zero());
    }

    #[test]
    fn hand_summed_share_with_pool_sink() {
        // gross 5000; share transfers 300 + 200; pool-sink 100 → net 4400
        let sink_pool = Address::from_low_u64(100);
        let tx = two_hop(
            10_000,
            15_000,
            vec![
                transfer(2, Address::VALIDATOR_INCOME, 300, false),
                transfer(3, Address::VALIDATOR_INCOME, 200, false),
                transfer(4, sink_pool, 100, true),
                transfer(5, Address::from_low_u64(42), 999, false),
            ],
        );
        let cycle = extract_arbitrage_cycle(&tx).unwrap();
        let b = attribute_profit(&tx, &cycle, &ShareAddresses::default(), &PriceTable::new()).unwrap();
        assert_eq!(b.gross, BigInt::from(5000));
        assert_eq!(b.share, BigUint::from(600u32));
        assert_eq!(b.net, BigInt::from(4400));
    }

    #[test]
    fn system_addresses_are_configurable() {
        let sys = Address::from_low_u64(0x1000);
        let tx = two_hop(1000, 1500, vec![transfer(2, sys, 50, false), transfer(3, Address::VALIDATOR_INCOME, 7, false)]);
        let cycle = extract_arbitrage_cycle(&tx).unwrap();
        let only_sys = attribute_profit(&tx, &cycle, &ShareAddresses::new([sys]), &PriceTable::new()).unwrap();
        assert_eq!(only_sys.share, BigUint::from(50u32));
    }

    #[test]
    fn negative_gross_reported() {
        let tx = two_hop(1000, 900, vec![]);
        let cycle = extract_arbitrage_cycle(&tx).unwrap();
        let b = attribute_profit(&tx, &cycle, &ShareAddresses::default(), &PriceTable::new()).unwrap();
        assert_eq!(b.net, BigInt::from(-100));
    }

    #[test]
    fn gas_converted_through_price_table() {
        // 0.001 BNB of gas at $891.78, paid out of a USDT cycle → 0.89178 USDT
        let mut tx = two_hop(1000, 2_000_000_000_000_000_000, vec![]);
        tx.gas_used = 100_000u32.into();
        tx.gas_price = 10_000_000_000u64.into();
        let cycle = extract_arbitrage_cycle(&tx).unwrap();
        let b = attribute_profit(&tx, &cycle, &ShareAddresses::default(), &wbnb_prices()).unwrap();
        assert_eq!(b.gas_cost, BigUint::from(1_000_000_000_000_000u64));
        assert_eq!(b.gas_in_base, BigUint::from(891_780_000_000_000_000u64));
        assert!(b.is_balanced());

        let missing = attribute_profit(&tx, &cycle, &ShareAddresses::default(), &PriceTable::with_stablecoins());
        assert!(matches!(missing, Err(ArbError::MissingPrice(ref s)) if s == "BNB"));
    }

    #[test]
    fn usd_conversion() {
        let wbnb = token("WBNB");
        let b = |net: i128, t: &TokenId| ProfitBreakdown {
            base_token: t.clone(),
            gross: BigInt::from(net),
            share: BigUint::zero(),
            gas_cost: BigUint::zero(),
            gas_in_base: BigUint::zero(),
            net: BigInt::from(net),
        };
        let p = wbnb_prices();
        assert_eq!(to_usd(&b(2_000_000_000_000_000_000, &wbnb), &p).unwrap(), ratio(178356, 100));
        assert!(to_usd(&b(0, &wbnb), &p).unwrap().is_zero());
        assert_eq!(to_usd(&b(1_500_000_000_000_000_000, &token("USDT")), &p).unwrap(), ratio(3, 2));
        assert!(matches!(to_usd(&b(1, &token("CAKE")), &p), Err(ArbError::MissingPrice(ref s)) if s == "CAKE"));
    }
}
