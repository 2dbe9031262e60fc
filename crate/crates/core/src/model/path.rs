use super::{Address, ModelError, TokenId};

/// Pool family flag. The on-wire bit is 0 for V3 and 1 for V2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoolType {
    V3,
    V2,
}

impl PoolType {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 { PoolType::V3 } else { PoolType::V2 }
    }

    pub fn bit(self) -> u8 {
        match self {
            PoolType::V3 => 0,
            PoolType::V2 => 1,
        }
    }
}

/// Swap direction flag. Bit 1 sells token0 for token1; bit 0 sells token1 for token0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    ZeroForOne,
    OneForZero,
}

impl Direction {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 { Direction::OneForZero } else { Direction::ZeroForOne }
    }

    pub fn bit(self) -> u8 {
        match self {
            Direction::ZeroForOne => 1,
            Direction::OneForZero => 0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::ZeroForOne => Direction::OneForZero,
            Direction::OneForZero => Direction::ZeroForOne,
        }
    }
}

/// Execution blueprint of a multi-hop route: `n + 1` tokens, `n` pools, `n` type flags and
/// `n` direction flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDescriptor {
    tokens: Vec<TokenId>,
    pools: Vec<Address>,
    pool_types: Vec<PoolType>,
    directions: Vec<Direction>,
}

impl PathDescriptor {
    pub fn new(
        tokens: Vec<TokenId>,
        pools: Vec<Address>,
        pool_types: Vec<PoolType>,
        directions: Vec<Direction>,
    ) -> Result<Self, ModelError> {
        let n = pools.len();
        if n == 0 || tokens.len() != n + 1 || pool_types.len() != n || directions.len() != n {
            return Err(ModelError::DescriptorLength {
                tokens: tokens.len(),
                pools: n,
                flags: pool_types.len(),
                dirs: directions.len(),
            });
        }
        Ok(PathDescriptor { tokens, pools, pool_types, directions })
    }

    pub fn hops(&self) -> usize {
        self.pools.len()
    }

    pub fn tokens(&self) -> &[TokenId] {
        &self.tokens
    }

    pub fn pools(&self) -> &[Address] {
        &self.pools
    }

    pub fn pool_types(&self) -> &[PoolType] {
        &self.pool_types
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn is_cycle(&self) -> bool {
        self.tokens.first() == self.tokens.last()
    }

    /// Hop `i` (0-based) as `(token_in, token_out, pool, type, direction)`.
    pub fn hop(&self, i: usize) -> (&TokenId, &TokenId, Address, PoolType, Direction) {
        (&self.tokens[i], &self.tokens[i + 1], self.pools[i], self.pool_types[i], self.directions[i])
    }
}
