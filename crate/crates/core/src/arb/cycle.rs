use num_bigint::BigUint;

use crate::model::{Address, TokenId, Transaction, TxHash};

/// One executed leg of a cycle, with the amounts observed in the trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hop {
    pub token_in: TokenId,
    pub token_out: TokenId,
    pub pool: Address,
    pub amount_in: BigUint,
    pub amount_out: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArbitrageCycle {
    pub tx_hash: TxHash,
    pub base_token: TokenId,
    pub path: Vec<Hop>,
}

impl ArbitrageCycle {
    pub fn hop_count(&self) -> usize {
        self.path.len()
    }

    /// Token sequence `base → … → base`.
    pub fn token_path(&self) -> Vec<&TokenId> {
        let mut out: Vec<&TokenId> = self.path.iter().map(|h| &h.token_in).collect();
        if let Some(last) = self.path.last() {
            out.push(&last.token_out);
        }
        out
    }

    pub fn render_path(&self) -> String {
        self.token_path().iter().map(|t| t.symbol.as_str()).collect::<Vec<_>>().join("->")
    }

    fn is_well_formed(&self) -> bool {
        let (Some(first), Some(last)) = (self.path.first(), self.path.last()) else {
            return false;
        };
        self.path.len() >= 2
            && first.token_in == self.base_token
            && last.token_out == self.base_token
            && self.path.windows(2).all(|w| w[0].token_out == w[1].token_in)
    }
}

/// Collects the swap legs of `tx` in trace order and returns them as a cycle when the entry
/// asset equals the exit asset and consecutive legs chain.
///
/// Pool-sink swaps deposit surplus rather than move along the route and are left out of the
/// path; they are accounted for as share profit instead.
pub fn extract_arbitrage_cycle(tx: &Transaction) -> Option<ArbitrageCycle> {
    let path: Vec<Hop> = tx
        .swaps()
        .filter(|s| !s.pool_sink)
        .map(|s| Hop {
            token_in: s.token_in.clone(),
            token_out: s.token_out.clone(),
            pool: s.pool,
            amount_in: s.amount_in.clone(),
            amount_out: s.amount_out.clone(),
        })
        .collect();
    let first = path.first()?;
    let last = path.last()?;
    if first.token_in != last.token_out {
        return None;
    }
    let cycle = ArbitrageCycle { tx_hash: tx.hash, base_token: first.token_in.clone(), path };
    cycle.is_well_formed().then_some(cycle)
}
