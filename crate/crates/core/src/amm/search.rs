use num_bigint::{BigInt, BigUint};
use num_traits::One;

use super::run::trial;
use super::{AmmError, PoolSet, RunParams};
use crate::model::PathDescriptor;

/// Settlement-token delta of running `params` without committing anything. Dust hops count as a
/// loss of the stranded input rather than an abort.
pub fn delta_at(descriptor: &PathDescriptor, pools: &PoolSet, params: &RunParams) -> Result<BigInt, AmmError> {
    Ok(trial(descriptor, pools, params)?.delta)
}

/// Input in `[lo, hi]` maximising the cycle's delta, found by integer ternary search.
/// When nothing is profitable the result is `(lo, delta(lo))`, which is then `≤ 0`.
pub fn best_input_search(
    descriptor: &PathDescriptor,
    pools: &PoolSet,
    lo: &BigUint,
    hi: &BigUint,
) -> Result<(BigUint, BigInt), AmmError> {
    best_input_search_with(descriptor, pools, lo, hi, &RunParams::new(1u8, 0))
}

/// As [`best_input_search`], reusing the final hop and price limits from `template`.
pub fn best_input_search_with(
    descriptor: &PathDescriptor,
    pools: &PoolSet,
    lo: &BigUint,
    hi: &BigUint,
    template: &RunParams,
) -> Result<(BigUint, BigInt), AmmError> {
    if lo >= hi {
        return Err(AmmError::Bounds);
    }
    let lo = lo.max(&BigUint::one()).clone();
    let f = |x: &BigUint| {
        let mut p = template.clone();
        p.amount0 = x.clone();
        delta_at(descriptor, pools, &p)
    };

    let (mut a, mut b) = (lo.clone(), hi.clone());
    while &b - &a > BigUint::from(2u8) {
        let third = (&b - &a) / 3u8;
        let m1 = &a + &third;
        let m2 = &b - &third;
        if f(&m1)? < f(&m2)? {
            a = m1 + 1u8;
        } else {
            b = m2;
        }
    }
    let mut best: Option<(BigUint, BigInt)> = None;
    let mut x = a;
    while x <= b {
        let d = f(&x)?;
        if best.as_ref().is_none_or(|(_, bd)| d > *bd) {
            best = Some((x.clone(), d));
        }
        x += 1u8;
    }
    let best = best.expect("non-empty range");
    if best.1 > BigInt::ZERO {
        Ok(best)
    } else {
        let d = f(&lo)?;
        Ok((lo, d))
    }
}
