use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Deserialize;

use super::{de_ms, de_u128, ms, ms_to_rational, Ms};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decay {
    /// Flat until the knee, linear down to the gas floor at the deadline.
    #[default]
    Piecewise,
    /// Exponential from the peak, reaching the gas floor at the deadline. The knee is unused.
    Exponential,
}

/// Value of a fleeting opportunity as a function of when it is acted on.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpportunityModel {
    #[serde(deserialize_with = "de_ms")]
    pub birth_ms: Ms,
    #[serde(deserialize_with = "de_u128")]
    pub peak_value: u128,
    pub decay: Decay,
    #[serde(deserialize_with = "de_ms")]
    pub knee_ms: Ms,
    #[serde(deserialize_with = "de_ms")]
    pub deadline_ms: Ms,
    #[serde(deserialize_with = "de_u128")]
    pub gas_floor: u128,
    /// Residual value past the deadline; below `gas_floor`.
    #[serde(deserialize_with = "de_u128")]
    pub epsilon: u128,
}

impl Default for OpportunityModel {
    fn default() -> Self {
        OpportunityModel {
            birth_ms: ms(0),
            peak_value: 1_000_000_000_000_000_000,
            decay: Decay::Piecewise,
            knee_ms: ms(100),
            deadline_ms: ms(200),
            gas_floor: 10_000_000_000_000_000,
            epsilon: 0,
        }
    }
}

impl OpportunityModel {
    pub fn validate(&self, prefix: &str) -> Vec<String> {
        let mut bad = Vec::new();
        if self.knee_ms < ms(0) {
            bad.push(format!("{prefix}knee_ms"));
        }
        if self.deadline_ms <= self.knee_ms {
            bad.push(format!("{prefix}deadline_ms"));
        }
        if self.gas_floor == 0 {
            bad.push(format!("{prefix}gas_floor"));
        }
        if self.epsilon >= self.gas_floor {
            bad.push(format!("{prefix}epsilon"));
        }
        bad
    }

    /// Value at absolute time `t`. Before birth the opportunity is worth its peak.
    pub fn value(&self, t: Ms) -> u128 {
        let dt = t - self.birth_ms;
        if dt >= self.deadline_ms {
            return self.epsilon;
        }
        if self.peak_value <= self.gas_floor {
            return self.peak_value;
        }
        if dt <= ms(0) {
            return self.peak_value;
        }
        match self.decay {
            Decay::Piecewise => {
                if dt <= self.knee_ms {
                    return self.peak_value;
                }
                let span = ms_to_rational(self.deadline_ms - self.knee_ms);
                let left = ms_to_rational(self.deadline_ms - dt);
                let drop = BigRational::from_integer(BigInt::from(self.peak_value - self.gas_floor));
                let v = BigRational::from_integer(BigInt::from(self.gas_floor)) + drop * left / span;
                v.floor().to_integer().to_u128().expect("between floor and peak")
            }
            Decay::Exponential => {
                let frac = ms_to_rational(dt) / ms_to_rational(self.deadline_ms);
                let ln_ratio = (self.peak_value as f64 / self.gas_floor as f64).ln();
                let v = self.peak_value as f64 * (-ln_ratio * frac.to_f64().unwrap_or(1.0)).exp();
                (v.floor() as u128).clamp(self.gas_floor, self.peak_value)
            }
        }
    }

    pub fn is_worth_bidding(&self, t: Ms) -> bool {
        let v = self.value(t);
        !v.is_zero() && v >= self.gas_floor
    }
}
