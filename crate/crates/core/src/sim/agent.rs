use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;

use super::{de_ms, ms, ms_to_rational, Ms};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    ShortHop,
    LongHop,
    Mixed,
}

impl Strategy {
    /// Relative cost of computing a bid: longer routes take longer to search.
    pub fn compute_multiplier(self) -> Ms {
        match self {
            Strategy::ShortHop => ms(1),
            Strategy::Mixed => Ms::new(5, 4),
            Strategy::LongHop => Ms::new(3, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuilderAgent {
    pub id: String,
    /// One-way delay to the proposer (or relay).
    #[serde(deserialize_with = "de_ms")]
    pub latency_ms: Ms,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub share_ratio_bp: u32,
    /// Infrastructure quality: divides compute time and raises the captured fraction of value.
    #[serde(deserialize_with = "de_ms", default = "one")]
    pub infra_tier: Ms,
    #[serde(default)]
    pub non_delivery_prob: f64,
}

fn one() -> Ms {
    ms(1)
}

impl BuilderAgent {
    pub fn new(id: impl Into<String>, latency_ms: Ms) -> Self {
        BuilderAgent {
            id: id.into(),
            latency_ms,
            strategy: Strategy::ShortHop,
            share_ratio_bp: 0,
            infra_tier: ms(1),
            non_delivery_prob: 0.0,
        }
    }

    pub fn with_tier(mut self, tier: Ms) -> Self {
        self.infra_tier = tier;
        self
    }

    pub fn with_share(mut self, bp: u32) -> Self {
        self.share_ratio_bp = bp;
        self
    }

    pub fn validate(&self, prefix: &str) -> Vec<String> {
        let mut bad = Vec::new();
        if self.id.is_empty() {
            bad.push(format!("{prefix}id"));
        }
        if self.latency_ms < ms(0) {
            bad.push(format!("{prefix}latency_ms"));
        }
        if self.share_ratio_bp > 10_000 {
            bad.push(format!("{prefix}share_ratio_bp"));
        }
        if self.infra_tier <= ms(0) {
            bad.push(format!("{prefix}infra_tier"));
        }
        if !(0.0..=1.0).contains(&self.non_delivery_prob) {
            bad.push(format!("{prefix}non_delivery_prob"));
        }
        bad
    }

    pub fn compute_ms(&self, base_compute_ms: Ms) -> Ms {
        base_compute_ms * self.strategy.compute_multiplier() / self.infra_tier
    }

    /// Fraction of an opportunity's value the builder can realise: `tier / (1 + tier)`.
    pub fn capture(&self) -> BigRational {
        let t = ms_to_rational(self.infra_tier);
        &t / (BigRational::from_integer(BigInt::from(1)) + &t)
    }

    /// Surplus realised from an opportunity currently worth `value`.
    pub fn realized(&self, value: u128) -> u128 {
        let v = BigRational::from_integer(BigInt::from(value)) * self.capture();
        u128::try_from(v.floor().to_integer()).expect("below value")
    }

    /// `⌊delta · r / 10000⌋`
    pub fn payment(&self, delta: u128) -> u128 {
        let d = BigInt::from(delta) * self.share_ratio_bp / 10_000u32;
        u128::try_from(d).expect("below delta")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compute_and_capture() {
        let b = BuilderAgent { strategy: Strategy::LongHop, ..BuilderAgent::new("a", ms(10)) }.with_tier(ms(2));
        assert_eq!(b.compute_ms(ms(10)), Ms::new(15, 2));
        assert_eq!(b.realized(900), 600);
        assert_eq!(b.with_share(2500).payment(1001), 250);
    }

    #[test]
    fn validation() {
        let mut b = BuilderAgent::new("", ms(-1)).with_share(10_001);
        b.non_delivery_prob = 2.0;
        assert_eq!(b.validate("b.").len(), 4);
    }
}
