use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;

/// One arbitrage's USD-normalised outcome as seen by the aggregations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfitEntry {
    pub brand: String,
    pub token: String,
    /// Builder-retained profit.
    pub net_usd: BigRational,
    /// Amount passed on to the proposer.
    pub share_usd: BigRational,
    pub gas_usd: BigRational,
}

impl ProfitEntry {
    pub fn new(brand: &str, token: &str, net_usd: BigRational, share_usd: BigRational) -> Self {
        ProfitEntry { brand: brand.into(), token: token.into(), net_usd, share_usd, gas_usd: BigRational::zero() }
    }
}

/// Net USD profit summed per (brand, token).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProfitMatrix {
    pub cells: BTreeMap<(String, String), BigRational>,
}

impl ProfitMatrix {
    pub fn cell(&self, brand: &str, token: &str) -> BigRational {
        self.cells.get(&(brand.to_string(), token.to_string())).cloned().unwrap_or_default()
    }

    pub fn brands(&self) -> BTreeSet<&str> {
        self.cells.keys().map(|(b, _)| b.as_str()).collect()
    }

    pub fn tokens(&self) -> BTreeSet<&str> {
        self.cells.keys().map(|(_, t)| t.as_str()).collect()
    }

    pub fn brand_total(&self, brand: &str) -> BigRational {
        self.cells.iter().filter(|((b, _), _)| b == brand).map(|(_, v)| v.clone()).sum()
    }

    pub fn token_total(&self, token: &str) -> BigRational {
        self.cells.iter().filter(|((_, t), _)| t == token).map(|(_, v)| v.clone()).sum()
    }

    pub fn grand_total(&self) -> BigRational {
        self.cells.values().cloned().sum()
    }

    /// Fraction of the token's profit earned by `brand`; `None` when the column sums to zero.
    pub fn builder_share(&self, brand: &str, token: &str) -> Option<BigRational> {
        let col = self.token_total(token);
        (!col.is_zero()).then(|| self.cell(brand, token) / col)
    }
}

pub fn profit_matrix(entries: &[ProfitEntry]) -> ProfitMatrix {
    let mut cells: BTreeMap<(String, String), BigRational> = BTreeMap::new();
    for e in entries {
        *cells.entry((e.brand.clone(), e.token.clone())).or_default() += &e.net_usd;
    }
    ProfitMatrix { cells }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProposerSplit {
    pub kept: BigRational,
    pub paid_to_proposer: BigRational,
    /// `paid / (paid + kept)`, zero when both are zero.
    pub payout_fraction: BigRational,
    pub gas: BigRational,
}

pub fn proposer_split(entries: &[ProfitEntry]) -> BTreeMap<String, ProposerSplit> {
    let mut acc: BTreeMap<String, (BigRational, BigRational, BigRational)> = BTreeMap::new();
    for e in entries {
        let slot = acc.entry(e.brand.clone()).or_default();
        slot.0 += &e.net_usd;
        slot.1 += &e.share_usd;
        slot.2 += &e.gas_usd;
    }
    acc.into_iter()
        .map(|(brand, (kept, paid, gas))| {
            let denom = &kept + &paid;
            let payout_fraction = if denom.is_zero() { BigRational::zero() } else { &paid / denom };
            (brand, ProposerSplit { kept, paid_to_proposer: paid, payout_fraction, gas })
        })
        .collect()
}

/// `net / (gas + share)`; `None` when nothing was spent on fees or shares.
pub fn profit_to_fee_ratio(net: &BigRational, gas: &BigRational, share: &BigRational) -> Option<BigRational> {
    let fees = gas + share;
    (!fees.is_zero()).then(|| net / fees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ratio};

    #[test]
    fn matrix_cells_and_marginals() {
        let e = vec![
            ProfitEntry::new("A", "WBNB", int(3), int(0)),
            ProfitEntry::new("A", "WBNB", int(2), int(0)),
            ProfitEntry::new("A", "USDT", int(1), int(0)),
            ProfitEntry::new("B", "WBNB", int(5), int(0)),
        ];
        let m = profit_matrix(&e);
        assert_eq!(m.cell("A", "WBNB"), int(5));
        assert_eq!(m.brand_total("A"), int(6));
        assert_eq!(m.token_total("WBNB"), int(10));
        assert_eq!(m.grand_total(), int(11));
        assert_eq!(m.builder_share("A", "WBNB"), Some(ratio(1, 2)));
        assert!(profit_matrix(&[]).cells.is_empty());
        assert_eq!(m.builder_share("A", "DAI"), None);
    }

    #[test]
    fn split_fractions() {
        let s = proposer_split(&[ProfitEntry::new("48Club", "USDT", int(2220), int(820))]);
        assert_eq!(s["48Club"].payout_fraction, ratio(820, 3040));
        let s = proposer_split(&[ProfitEntry::new("x", "USDT", int(9), int(0))]);
        assert!(s["x"].payout_fraction.is_zero());
        let s = proposer_split(&[ProfitEntry::new("x", "USDT", int(0), int(0))]);
        assert!(s["x"].payout_fraction.is_zero());
    }

    #[test]
    fn fee_ratio() {
        assert_eq!(profit_to_fee_ratio(&int(2220), &int(0), &int(820)), Some(ratio(2220, 820)));
        assert_eq!(profit_to_fee_ratio(&int(5), &int(0), &int(0)), None);
    }
}
