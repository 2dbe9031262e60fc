use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::AnalyticsError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathComplexity {
    pub histogram: BTreeMap<usize, u64>,
    /// `(hop_count, P(X ≤ hop_count))` at every observed hop count.
    pub ecdf: Vec<(usize, BigRational)>,
    pub total: u64,
}

pub fn path_complexity(hop_counts: impl IntoIterator<Item = usize>) -> PathComplexity {
    let mut histogram: BTreeMap<usize, u64> = BTreeMap::new();
    for h in hop_counts {
        *histogram.entry(h).or_default() += 1;
    }
    let total: u64 = histogram.values().sum();
    let mut running = 0u64;
    let ecdf = histogram
        .iter()
        .map(|(&h, &c)| {
            running += c;
            (h, BigRational::new(BigInt::from(running), BigInt::from(total)))
        })
        .collect();
    PathComplexity { histogram, ecdf, total }
}

/// Pearson correlation of `(x, y)` pairs.
///
/// Sums are exact; the only rounding is the final square root of `r²`.
pub fn pathlen_profit_correlation(points: &[(BigRational, BigRational)]) -> Result<f64, AnalyticsError> {
    if points.len() < 2 {
        return Err(AnalyticsError::UndefinedCorrelation("fewer than two points"));
    }
    let n = BigRational::from_integer(BigInt::from(points.len()));
    let mx: BigRational = points.iter().map(|p| p.0.clone()).sum::<BigRational>() / &n;
    let my: BigRational = points.iter().map(|p| p.1.clone()).sum::<BigRational>() / &n;
    let (mut sxy, mut sxx, mut syy) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
    for (x, y) in points {
        let (dx, dy) = (x - &mx, y - &my);
        sxy += &dx * &dy;
        sxx += &dx * &dx;
        syy += &dy * &dy;
    }
    if sxx.is_zero() || syy.is_zero() {
        return Err(AnalyticsError::UndefinedCorrelation("zero variance"));
    }
    let r2 = (&sxy * &sxy) / (sxx * syy);
    let r = r2.to_f64().expect("r² in [0, 1]").sqrt().min(1.0);
    Ok(if sxy.is_negative() { -r } else { r })
}
