use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use super::AmmError;
use crate::model::{Address, Direction, PathDescriptor, PoolType, TokenId};

/// Fee denominator: fees are parts per million of the input amount.
pub const FEE_SCALE: u32 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PoolKind {
    V2 { reserve0: BigUint, reserve1: BigUint },
    /// A single active liquidity range; `sqrt_price_x96` is √(token1/token0) in Q64.96.
    V3 { liquidity: BigUint, sqrt_price_x96: BigUint },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PoolState {
    pub address: Address,
    pub token0: TokenId,
    pub token1: TokenId,
    pub fee_ppm: u32,
    pub kind: PoolKind,
}

impl PoolState {
    pub fn v2(address: Address, token0: TokenId, token1: TokenId, fee_ppm: u32, r0: BigUint, r1: BigUint) -> Self {
        PoolState { address, token0, token1, fee_ppm, kind: PoolKind::V2 { reserve0: r0, reserve1: r1 } }
    }

    pub fn v3(
        address: Address,
        token0: TokenId,
        token1: TokenId,
        fee_ppm: u32,
        liquidity: BigUint,
        sqrt_price_x96: BigUint,
    ) -> Self {
        PoolState { address, token0, token1, fee_ppm, kind: PoolKind::V3 { liquidity, sqrt_price_x96 } }
    }

    pub fn pool_type(&self) -> PoolType {
        match self.kind {
            PoolKind::V2 { .. } => PoolType::V2,
            PoolKind::V3 { .. } => PoolType::V3,
        }
    }

    pub fn validate(&self) -> Result<(), AmmError> {
        if self.token0 == self.token1 {
            return Err(AmmError::InvalidPool { pool: self.address, reason: "token0 equals token1".into() });
        }
        if self.fee_ppm >= FEE_SCALE {
            return Err(AmmError::InvalidPool { pool: self.address, reason: format!("fee {} ppm", self.fee_ppm) });
        }
        match &self.kind {
            PoolKind::V2 { reserve0, reserve1 } if reserve0.is_zero() || reserve1.is_zero() => {
                Err(AmmError::InactivePool(self.address))
            }
            PoolKind::V3 { liquidity, sqrt_price_x96 } if liquidity.is_zero() || sqrt_price_x96.is_zero() => {
                Err(AmmError::InactivePool(self.address))
            }
            _ => Ok(()),
        }
    }

    /// Direction that sells `token_in` into this pool.
    pub fn direction_for(&self, token_in: &TokenId) -> Result<Direction, AmmError> {
        if *token_in == self.token0 {
            Ok(Direction::ZeroForOne)
        } else if *token_in == self.token1 {
            Ok(Direction::OneForZero)
        } else {
            Err(AmmError::TokenNotInPool { pool: self.address, token: token_in.symbol.clone() })
        }
    }

    pub fn tokens_for(&self, direction: Direction) -> (&TokenId, &TokenId) {
        match direction {
            Direction::ZeroForOne => (&self.token0, &self.token1),
            Direction::OneForZero => (&self.token1, &self.token0),
        }
    }

    /// Same pool with token order swapped.
    pub fn mirrored(&self) -> Self {
        let kind = match &self.kind {
            PoolKind::V2 { reserve0, reserve1 } => PoolKind::V2 { reserve0: reserve1.clone(), reserve1: reserve0.clone() },
            PoolKind::V3 { liquidity, sqrt_price_x96 } => PoolKind::V3 {
                liquidity: liquidity.clone(),
                sqrt_price_x96: (BigUint::from(1u8) << 192) / sqrt_price_x96,
            },
        };
        PoolState { address: self.address, token0: self.token1.clone(), token1: self.token0.clone(), fee_ppm: self.fee_ppm, kind }
    }
}

/// Pools keyed by address.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PoolSet(BTreeMap<Address, PoolState>);

impl PoolSet {
    pub fn new(pools: impl IntoIterator<Item = PoolState>) -> Self {
        PoolSet(pools.into_iter().map(|p| (p.address, p)).collect())
    }

    pub fn get(&self, a: &Address) -> Result<&PoolState, AmmError> {
        self.0.get(a).ok_or(AmmError::MissingPool(*a))
    }

    pub fn insert(&mut self, p: PoolState) {
        self.0.insert(p.address, p);
    }

    pub fn iter(&self) -> impl Iterator<Item = &PoolState> {
        self.0.values()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut PoolState> {
        self.0.values_mut()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Builds the descriptor for selling `start` along `route`, deriving type and direction flags
    /// from the pools themselves.
    pub fn descriptor(&self, start: &TokenId, route: &[Address]) -> Result<PathDescriptor, AmmError> {
        let mut tokens = vec![start.clone()];
        let mut types = Vec::with_capacity(route.len());
        let mut dirs = Vec::with_capacity(route.len());
        for addr in route {
            let pool = self.get(addr)?;
            let current = tokens.last().expect("non-empty");
            let dir = pool.direction_for(current)?;
            let (_, out) = pool.tokens_for(dir);
            tokens.push(out.clone());
            types.push(pool.pool_type());
            dirs.push(dir);
        }
        Ok(PathDescriptor::new(tokens, route.to_vec(), types, dirs)?)
    }

    pub(crate) fn replace_all(&mut self, updated: BTreeMap<Address, PoolState>) {
        self.0.extend(updated);
    }
}
