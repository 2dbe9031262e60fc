use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::model::{Address, EventBody, TokenId, Transaction, TxHash};

pub const DEFAULT_FLOW_HOPS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AddressCategory {
    CexHotWallet,
    WalletEoa,
    Aggregator,
    Contract,
    Pool,
    OtherUnknown,
}

impl AddressCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            AddressCategory::CexHotWallet => "cex_hot_wallet",
            AddressCategory::WalletEoa => "wallet_eoa",
            AddressCategory::Aggregator => "aggregator",
            AddressCategory::Contract => "contract",
            AddressCategory::Pool => "pool",
            AddressCategory::OtherUnknown => "other_unknown",
        }
    }
}

impl fmt::Display for AddressCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AddressCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "cex_hot_wallet" | "cex" => AddressCategory::CexHotWallet,
            "wallet_eoa" | "eoa" | "wallet" => AddressCategory::WalletEoa,
            "aggregator" => AddressCategory::Aggregator,
            "contract" => AddressCategory::Contract,
            "pool" => AddressCategory::Pool,
            "other_unknown" | "other" | "unknown" => AddressCategory::OtherUnknown,
            other => return Err(format!("unknown address category {other:?}")),
        })
    }
}

/// One value movement. `hop` is the BFS level (1 = emitted by the seed transaction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowEdge {
    pub from: Address,
    pub to: Address,
    pub token: Option<TokenId>,
    pub amount: BigUint,
    pub tx_hash: TxHash,
    pub event_index: u32,
    pub hop: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowGraph {
    pub nodes: BTreeMap<Address, AddressCategory>,
    pub edges: Vec<FlowEdge>,
    pub max_hops: u32,
}

impl FlowGraph {
    /// Total amount moved between categories, keyed by `(from, to, token symbol)`.
    /// Native-value movements use the symbol `native`.
    pub fn category_totals(&self) -> BTreeMap<(AddressCategory, AddressCategory, String), (BigUint, u64)> {
        let mut out: BTreeMap<_, (BigUint, u64)> = BTreeMap::new();
        for e in &self.edges {
            let key = (
                self.nodes[&e.from],
                self.nodes[&e.to],
                e.token.as_ref().map_or_else(|| "native".to_string(), |t| t.symbol.clone()),
            );
            let slot = out.entry(key).or_default();
            slot.0 += &e.amount;
            slot.1 += 1;
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct EventRef {
    tx: usize,
    event: usize,
}

/// Transactions indexed by the sender of each transfer they contain. Read-only once built.
#[derive(Debug, Clone, Default)]
pub struct TxStore {
    txs: Vec<Transaction>,
    by_sender: HashMap<Address, Vec<EventRef>>,
}

fn movement(tx: &Transaction, event: usize) -> Option<(Address, Address, Option<&TokenId>, &BigUint)> {
    match &tx.events[event].body {
        EventBody::Transfer(t) => Some((t.from.unwrap_or(tx.initiator), t.to, t.token.as_ref(), &t.amount)),
        EventBody::InternalTxn(t) => Some((t.from.unwrap_or(tx.initiator), t.to, None, &t.amount)),
        _ => None,
    }
}

impl TxStore {
    pub fn new(txs: Vec<Transaction>) -> Self {
        let mut by_sender: HashMap<Address, Vec<EventRef>> = HashMap::new();
        for (ti, tx) in txs.iter().enumerate() {
            for ei in 0..tx.events.len() {
                if let Some((from, ..)) = movement(tx, ei) {
                    by_sender.entry(from).or_default().push(EventRef { tx: ti, event: ei });
                }
            }
        }
        TxStore { txs, by_sender }
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.txs
    }

    pub fn len(&self) -> usize {
        self.txs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.txs.is_empty()
    }
}

/// Breadth-first walk over transfers leaving the seed transaction, up to `k` levels deep.
///
/// Level 1 is every transfer inside the seed. Level `j + 1` is every transfer in the corpus sent
/// by an address first reached at level `j`. Addresses are expanded at most once.
pub fn trace_flows(
    seed: &Transaction,
    corpus: &TxStore,
    k: u32,
    categories: &HashMap<Address, AddressCategory>,
) -> FlowGraph {
    let mut nodes = BTreeMap::new();
    let mut edges = Vec::new();
    let mut seen_events: HashSet<(TxHash, u32)> = HashSet::new();
    let mut expanded: HashSet<Address> = HashSet::new();
    let category = |a: &Address| categories.get(a).copied().unwrap_or(AddressCategory::OtherUnknown);

    let mut push = |tx: &Transaction, ei: usize, hop: u32, frontier: &mut BTreeSet<Address>| {
        let Some((from, to, token, amount)) = movement(tx, ei) else { return };
        if !seen_events.insert((tx.hash, tx.events[ei].index)) {
            return;
        }
        nodes.insert(from, category(&from));
        nodes.insert(to, category(&to));
        edges.push(FlowEdge {
            from,
            to,
            token: token.cloned(),
            amount: amount.clone(),
            tx_hash: tx.hash,
            event_index: tx.events[ei].index,
            hop,
        });
        frontier.insert(to);
    };

    if k == 0 {
        return FlowGraph { nodes, edges, max_hops: k };
    }

    let mut frontier = BTreeSet::new();
    for ei in 0..seed.events.len() {
        push(seed, ei, 1, &mut frontier);
    }
    expanded.insert(seed.initiator);

    for hop in 2..=k {
        let mut next = BTreeSet::new();
        for addr in std::mem::take(&mut frontier) {
            if !expanded.insert(addr) {
                continue;
            }
            for r in corpus.by_sender.get(&addr).map(Vec::as_slice).unwrap_or_default() {
                push(&corpus.txs[r.tx], r.event, hop, &mut next);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    FlowGraph { nodes, edges, max_hops: k }
}
