use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::AnalyticsError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareRow {
    pub brand: String,
    pub block_count: u64,
    pub validator_count: u64,
    pub share: BigRational,
}

/// Rows ordered by share (descending), ties by brand.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShareTable {
    pub rows: Vec<ShareRow>,
}

impl ShareTable {
    /// Combined share of the `k` largest brands.
    pub fn top_k(&self, k: usize) -> BigRational {
        self.rows.iter().take(k).map(|r| r.share.clone()).sum()
    }

    pub fn total_blocks(&self) -> u64 {
        self.rows.iter().map(|r| r.block_count).sum()
    }

    pub fn with_validator_counts(mut self, counts: &BTreeMap<String, u64>) -> Self {
        for r in &mut self.rows {
            r.validator_count = counts.get(&r.brand).copied().unwrap_or(0);
        }
        self
    }
}

pub fn market_share(block_counts: &BTreeMap<String, u64>) -> Result<ShareTable, AnalyticsError> {
    let total: u64 = block_counts.values().sum();
    if total == 0 {
        return Err(AnalyticsError::EmptyMarket);
    }
    let mut rows: Vec<ShareRow> = block_counts
        .iter()
        .map(|(brand, &n)| ShareRow {
            brand: brand.clone(),
            block_count: n,
            validator_count: 0,
            share: BigRational::new(BigInt::from(n), BigInt::from(total)),
        })
        .collect();
    rows.sort_by(|a, b| b.share.cmp(&a.share).then_with(|| a.brand.cmp(&b.brand)));
    debug_assert!(rows.iter().map(|r| r.share.clone()).sum::<BigRational>() == BigRational::from_integer(1.into()));
    debug_assert!(!rows.iter().any(|r| r.share < BigRational::zero()));
    Ok(ShareTable { rows })
}
