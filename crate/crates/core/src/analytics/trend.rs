use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use statrs::distribution::{ContinuousCDF, Normal};

use super::AnalyticsError;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendDirection {
    Increasing,
    Decreasing,
    NoTrend,
}

impl TrendDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            TrendDirection::Increasing => "increasing",
            TrendDirection::Decreasing => "decreasing",
            TrendDirection::NoTrend => "no_trend",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendResult {
    pub n: usize,
    pub s_statistic: i64,
    /// Tie-corrected variance of S.
    pub variance: BigRational,
    pub z_score: f64,
    /// `S / (n(n−1)/2)`.
    pub tau: BigRational,
    pub p_value: f64,
    pub direction: TrendDirection,
    pub alpha: f64,
}

/// Counts pairs `i < j` with `x[i] > x[j]` by merge sort, sorting `x` in place.
fn inversions(x: &mut [BigRational]) -> u64 {
    let n = x.len();
    if n < 2 {
        return 0;
    }
    let (mut left, mut right) = (x[..n / 2].to_vec(), x[n / 2..].to_vec());
    let mut count = inversions(&mut left) + inversions(&mut right);
    let (mut i, mut j) = (0, 0);
    for slot in x.iter_mut() {
        if j >= right.len() || (i < left.len() && left[i] <= right[j]) {
            *slot = left[i].clone();
            i += 1;
        } else {
            *slot = right[j].clone();
            count += (left.len() - i) as u64;
            j += 1;
        }
    }
    count
}

/// `S = Σ_{i<j} sign(x_j − x_i)` in O(n log n). Also returns the sizes of tied groups.
pub fn mann_kendall_s(series: &[BigRational]) -> (i64, Vec<u64>) {
    let mut sorted = series.to_vec();
    let discordant = inversions(&mut sorted) as i64;
    let mut ties = Vec::new();
    let mut k = 0;
    while k < sorted.len() {
        let mut m = k + 1;
        while m < sorted.len() && sorted[m] == sorted[k] {
            m += 1;
        }
        if m - k > 1 {
            ties.push((m - k) as u64);
        }
        k = m;
    }
    let n = series.len() as i64;
    let pairs = n * (n - 1) / 2;
    let tied: i64 = ties.iter().map(|&t| (t * (t - 1) / 2) as i64).sum();
    let concordant = pairs - discordant - tied;
    (concordant - discordant, ties)
}

pub fn mann_kendall(series: &[BigRational], alpha: f64) -> Result<TrendResult, AnalyticsError> {
    let n = series.len();
    if n < 3 {
        return Err(AnalyticsError::InsufficientData(n));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AnalyticsError::Alpha);
    }
    let (s, ties) = mann_kendall_s(series);
    let nn = n as i64;
    let base = BigInt::from(nn * (nn - 1) * (2 * nn + 5));
    let correction: BigInt = ties.iter().map(|&t| BigInt::from(t * (t - 1) * (2 * t + 5))).sum();
    let variance = BigRational::new(base - correction, BigInt::from(18));
    let sd = crate::num::rational_to_f64(&variance).sqrt();
    let z = if s > 0 && sd > 0.0 {
        (s - 1) as f64 / sd
    } else if s < 0 && sd > 0.0 {
        (s + 1) as f64 / sd
    } else {
        0.0
    };
    let normal = Normal::standard();
    let critical = normal.inverse_cdf(1.0 - alpha / 2.0);
    let p_value = 2.0 * (1.0 - normal.cdf(z.abs()));
    let direction = if z.abs() < critical {
        TrendDirection::NoTrend
    } else if z > 0.0 {
        TrendDirection::Increasing
    } else {
        TrendDirection::Decreasing
    };
    let tau = BigRational::new(BigInt::from(s), BigInt::from(nn * (nn - 1) / 2));
    Ok(TrendResult { n, s_statistic: s, variance, z_score: z, tau, p_value, direction, alpha })
}

/// Sums values into UTC calendar days, filling days without observations with zero.
pub fn daily_series(points: impl IntoIterator<Item = (i64, BigRational)>) -> Vec<(NaiveDate, BigRational)> {
    let mut days: BTreeMap<NaiveDate, BigRational> = BTreeMap::new();
    for (ts, v) in points {
        let Some(dt) = DateTime::from_timestamp(ts, 0) else { continue };
        *days.entry(dt.date_naive()).or_default() += v;
    }
    let (Some(&first), Some(&last)) = (days.keys().next(), days.keys().next_back()) else {
        return Vec::new();
    };
    first
        .iter_days()
        .take_while(|d| *d <= last)
        .map(|d| (d, days.get(&d).cloned().unwrap_or_else(BigRational::zero)))
        .collect()
}
