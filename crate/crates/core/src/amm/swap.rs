use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{AmmError, PoolKind, PoolState, FEE_SCALE};
use crate::model::{Direction, TokenId};
use crate::num::{ceil_u, floor_u, to_signed};

/// Lowest and highest sqrt prices accepted by a V3 pool (Q64.96).
pub const MIN_SQRT_RATIO: u64 = 4_295_128_739;
pub const MAX_SQRT_RATIO: &str = "1461446703485210103287273052203988822378723970342";

pub fn q96() -> BigUint {
    BigUint::one() << 96
}

pub fn max_sqrt_ratio() -> BigUint {
    MAX_SQRT_RATIO.parse().expect("constant")
}

/// Most permissive valid limit for the direction.
pub fn permissive_limit(direction: Direction) -> BigUint {
    match direction {
        Direction::ZeroForOne => BigUint::from(MIN_SQRT_RATIO + 1),
        Direction::OneForZero => max_sqrt_ratio() - 1u8,
    }
}

/// Constant-product output before any precondition checks. May be zero.
pub(crate) fn v2_amount_out(amount_in: &BigUint, reserve_in: &BigUint, reserve_out: &BigUint, fee_ppm: u32) -> BigUint {
    let with_fee = amount_in * (FEE_SCALE - fee_ppm);
    let numerator = &with_fee * reserve_out;
    let denominator = reserve_in * FEE_SCALE + with_fee;
    numerator / denominator
}

pub(crate) fn swap_v2_raw(pool: &PoolState, token_in: &TokenId, amount_in: &BigUint) -> Result<(BigUint, PoolState), AmmError> {
    let PoolKind::V2 { reserve0, reserve1 } = &pool.kind else {
        return Err(AmmError::KindMismatch { pool: pool.address, expected: "v2" });
    };
    pool.validate()?;
    let direction = pool.direction_for(token_in)?;
    if amount_in.is_zero() {
        return Err(AmmError::ZeroInput(pool.address));
    }
    let (r_in, r_out) = match direction {
        Direction::ZeroForOne => (reserve0, reserve1),
        Direction::OneForZero => (reserve1, reserve0),
    };
    let out = v2_amount_out(amount_in, r_in, r_out, pool.fee_ppm);
    let (new_in, new_out) = (r_in + amount_in, r_out - &out);
    let mut next = pool.clone();
    next.kind = match direction {
        Direction::ZeroForOne => PoolKind::V2 { reserve0: new_in, reserve1: new_out },
        Direction::OneForZero => PoolKind::V2 { reserve0: new_out, reserve1: new_in },
    };
    Ok((out, next))
}

/// Exact-input constant-product swap with the fee taken on input, rounding the output down.
pub fn swap_v2(pool: &PoolState, token_in: &TokenId, amount_in: &BigUint) -> Result<(BigUint, PoolState), AmmError> {
    let (out, next) = swap_v2_raw(pool, token_in, amount_in)?;
    if out.is_zero() {
        return Err(AmmError::Dust(pool.address));
    }
    Ok((out, next))
}

/// Result of a single-range exact-input swap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct V3Swap {
    pub amount_out: BigUint,
    /// Input actually taken by the pool, fee included.
    pub consumed: BigUint,
    /// Input left unconsumed because the price limit was reached.
    pub remainder: BigUint,
    pub pool: PoolState,
}

fn rat(u: &BigUint) -> BigRational {
    BigRational::from_integer(to_signed(u))
}

/// Exact-input swap against one concentrated-liquidity range.
///
/// The sqrt price moves along `L = Δy / Δ√P` (token1 side) and `L = Δx / Δ(1/√P)` (token0
/// side). Movement past `price_limit` is clipped there and the unspent input is returned as
/// `remainder`. Outputs are computed from the exact new price and rounded down; the stored
/// sqrt price is rounded against the trader.
pub fn swap_v3(pool: &PoolState, direction: Direction, amount_in: &BigUint, price_limit: &BigUint) -> Result<V3Swap, AmmError> {
    let PoolKind::V3 { liquidity, sqrt_price_x96 } = &pool.kind else {
        return Err(AmmError::KindMismatch { pool: pool.address, expected: "v3" });
    };
    pool.validate()?;
    if amount_in.is_zero() {
        return Err(AmmError::ZeroInput(pool.address));
    }
    let wrong_side = match direction {
        Direction::ZeroForOne => price_limit > sqrt_price_x96 || *price_limit < BigUint::from(MIN_SQRT_RATIO),
        Direction::OneForZero => price_limit < sqrt_price_x96 || *price_limit > max_sqrt_ratio(),
    };
    if wrong_side {
        return Err(AmmError::WrongSideLimit { pool: pool.address, limit: price_limit.clone() });
    }

    let q = rat(&q96());
    let l = rat(liquidity);
    let s = rat(sqrt_price_x96) / &q;
    let s_limit = rat(price_limit) / &q;
    let scale = BigRational::from_integer(BigInt::from(FEE_SCALE));
    let keep = BigRational::from_integer(BigInt::from(FEE_SCALE - pool.fee_ppm));
    let net_in = floor_u(&(rat(amount_in) * &keep / &scale));
    let x = rat(&net_in);

    let (target, crosses) = match direction {
        Direction::ZeroForOne => {
            let t = &l * &s / (&l + &x * &s);
            let crosses = t < s_limit;
            (if crosses { s_limit.clone() } else { t }, crosses)
        }
        Direction::OneForZero => {
            let t = &s + &x / &l;
            let crosses = t > s_limit;
            (if crosses { s_limit.clone() } else { t }, crosses)
        }
    };

    let consumed = if crosses {
        let net_needed = match direction {
            Direction::ZeroForOne => &l * (target.recip() - s.recip()),
            Direction::OneForZero => &l * (&target - &s),
        };
        let gross = ceil_u(&(rat(&ceil_u(&net_needed)) * &scale / &keep));
        gross.min(amount_in.clone())
    } else {
        amount_in.clone()
    };

    let amount_out = match direction {
        Direction::ZeroForOne => floor_u(&(&l * (&s - &target))),
        Direction::OneForZero => floor_u(&(&l * (s.recip() - target.recip()))),
    };
    let stored = &target * &q;
    let new_sqrt = match direction {
        Direction::ZeroForOne => ceil_u(&stored),
        Direction::OneForZero => floor_u(&stored),
    };
    let mut next = pool.clone();
    next.kind = PoolKind::V3 { liquidity: liquidity.clone(), sqrt_price_x96: new_sqrt };
    Ok(V3Swap { amount_out, remainder: amount_in - &consumed, consumed, pool: next })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arb::fixtures::token;
    use crate::model::Address;

    fn v2(r0: u64, r1: u64, fee: u32) -> PoolState {
        PoolState::v2(Address::from_low_u64(1), token("WBNB"), token("USDT"), fee, r0.into(), r1.into())
    }

    fn v3(l: u128, sqrt: BigUint, fee: u32) -> PoolState {
        PoolState::v3(Address::from_low_u64(2), token("WBNB"), token("USDT"), fee, l.into(), sqrt)
    }

    #[test]
    fn v2_reference_value() {
        // ⌊99700·1000 / 1099700⌋ = 90
        let (out, next) = swap_v2(&v2(1000, 1000, 3000), &token("WBNB"), &100u32.into()).unwrap();
        assert_eq!(out, BigUint::from(90u32));
        assert_eq!(next.kind, PoolKind::V2 { reserve0: 1100u32.into(), reserve1: 910u32.into() });
    }

    #[test]
    fn v2_rejects_zero_input_and_foreign_token() {
        let p = v2(1_000_000, 1_000_000, 0);
        assert!(matches!(swap_v2(&p, &token("WBNB"), &BigUint::zero()), Err(AmmError::ZeroInput(_))));
        assert!(matches!(swap_v2(&p, &token("CAKE"), &1u8.into()), Err(AmmError::TokenNotInPool { .. })));
    }

    #[test]
    fn v2_dust() {
        let p = v2(1_000_000, 10, 3000);
        assert!(matches!(swap_v2(&p, &token("WBNB"), &1u8.into()), Err(AmmError::Dust(_))));
    }

    #[test]
    fn v2_round_trip_never_gains() {
        let p = v2(1_000_000, 1_000_000, 0);
        let (out, p1) = swap_v2(&p, &token("WBNB"), &5000u32.into()).unwrap();
        let (back, _) = swap_v2(&p1, &token("USDT"), &out).unwrap();
        assert!(back <= BigUint::from(5000u32));
    }

    #[test]
    fn v3_limit_at_current_price_is_noop() {
        let p = v3(1_000_000_000_000, q96(), 0);
        let r = swap_v3(&p, Direction::ZeroForOne, &1_000_000u32.into(), &q96()).unwrap();
        assert!(r.amount_out.is_zero());
        assert_eq!(r.pool.kind, p.kind);
        assert_eq!(r.remainder, BigUint::from(1_000_000u32));
    }

    #[test]
    fn v3_wrong_side_limit() {
        let p = v3(1_000_000_000_000, q96(), 0);
        let above = q96() + 1u8;
        assert!(matches!(
            swap_v3(&p, Direction::ZeroForOne, &10u8.into(), &above),
            Err(AmmError::WrongSideLimit { .. })
        ));
        let below = q96() - 1u8;
        assert!(matches!(
            swap_v3(&p, Direction::OneForZero, &10u8.into(), &below),
            Err(AmmError::WrongSideLimit { .. })
        ));
    }

    #[test]
    fn v3_inactive_pool() {
        let p = v3(0, q96(), 0);
        let lim = permissive_limit(Direction::ZeroForOne);
        assert!(matches!(swap_v3(&p, Direction::ZeroForOne, &10u8.into(), &lim), Err(AmmError::InactivePool(_))));
    }

    #[test]
    fn v3_partial_fill_reports_remainder() {
        let p = v3(1_000_000_000_000, q96(), 3000);
        // limit at √0.99: roughly 5e9 token0 moves the price there
        let limit = q96() * 995u32 / 1000u32;
        let r = swap_v3(&p, Direction::ZeroForOne, &100_000_000_000u64.into(), &limit).unwrap();
        assert!(r.remainder > BigUint::zero());
        assert_eq!(&r.consumed + &r.remainder, BigUint::from(100_000_000_000u64));
        assert_eq!(r.pool.kind, PoolKind::V3 { liquidity: 1_000_000_000_000u64.into(), sqrt_price_x96: limit });
    }

    /// Virtual-reserve form of a single-range pool: x_v = L/√P, y_v = L·√P, then constant product.
    fn virtual_reserve_oracle(l: &BigUint, sqrt_x96: &BigUint, fee: u32, dir: Direction, amount_in: &BigUint) -> BigUint {
        let q = rat(&q96());
        let s = rat(sqrt_x96) / &q;
        let l = rat(l);
        let (x_v, y_v) = (&l / &s, &l * &s);
        let net = rat(&(amount_in * (FEE_SCALE - fee) / FEE_SCALE));
        let (r_in, r_out) = match dir {
            Direction::ZeroForOne => (x_v, y_v),
            Direction::OneForZero => (y_v, x_v),
        };
        floor_u(&(&r_out * &net / (r_in + &net)))
    }

    #[test]
    fn v3_reference_value() {
        let p = v3(1_000_000_000_000, q96(), 0);
        let lim = permissive_limit(Direction::ZeroForOne);
        let r = swap_v3(&p, Direction::ZeroForOne, &1_000_000u32.into(), &lim).unwrap();
        assert_eq!(r.amount_out, BigUint::from(999_999u32));
        assert!(r.remainder.is_zero());
    }

    #[test]
    fn v3_matches_virtual_reserve_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let l: u128 = rng.random_range(1_000_000..1_000_000_000_000_000_000);
            let sqrt = q96() * rng.random_range(1u32..10_000) / 1000u32;
            let fee = [0, 100, 500, 3000, 10_000][rng.random_range(0..5)];
            let dir = if rng.random_bool(0.5) { Direction::ZeroForOne } else { Direction::OneForZero };
            let amount = BigUint::from(rng.random_range(1u64..1_000_000_000_000));
            let p = v3(l, sqrt.clone(), fee);
            let r = swap_v3(&p, dir, &amount, &permissive_limit(dir)).unwrap();
            assert_eq!(r.amount_out, virtual_reserve_oracle(&l.into(), &sqrt, fee, dir, &amount));
        }
    }

    #[test]
    fn v3_mirrored_pool_gives_same_output() {
        for sqrt in [q96(), q96() * 4u8, q96() / 8u8] {
            let p = v3(5_000_000_000_000, sqrt, 500);
            let m = p.mirrored();
            for dir in [Direction::ZeroForOne, Direction::OneForZero] {
                let amount = BigUint::from(123_456_789u64);
                let a = swap_v3(&p, dir, &amount, &permissive_limit(dir)).unwrap();
                let b = swap_v3(&m, dir.flipped(), &amount, &permissive_limit(dir.flipped())).unwrap();
                assert_eq!(a.amount_out, b.amount_out);
            }
        }
    }
}
