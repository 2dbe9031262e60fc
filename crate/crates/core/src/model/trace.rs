use num_bigint::BigUint;

use super::{Address, ModelError, TokenId, TxHash};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Swap,
    Sync,
    Transfer,
    InternalTxn,
}

impl EventKind {
    pub fn wire_name(self) -> &'static str {
        match self {
            EventKind::Swap => "swap",
            EventKind::Sync => "sync",
            EventKind::Transfer => "transfer",
            EventKind::InternalTxn => "internal",
        }
    }

    pub fn from_wire(s: &str) -> Option<Self> {
        match s {
            "swap" => Some(EventKind::Swap),
            "sync" => Some(EventKind::Sync),
            "transfer" => Some(EventKind::Transfer),
            "internal" => Some(EventKind::InternalTxn),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Swap {
    pub pool: Address,
    pub token_in: TokenId,
    pub token_out: TokenId,
    pub amount_in: BigUint,
    pub amount_out: BigUint,
    pub to: Option<Address>,
    /// Set when this swap deposits surplus into the pool rather than executing a path leg.
    pub pool_sink: bool,
    /// Surplus routed into the pool by a pool-sink swap. Falls back to `amount_in` when absent.
    pub routed: Option<BigUint>,
}

impl Swap {
    pub fn routed_amount(&self) -> &BigUint {
        self.routed.as_ref().unwrap_or(&self.amount_in)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sync {
    pub pool: Option<Address>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfer {
    /// Sender; the transaction initiator when absent.
    pub from: Option<Address>,
    pub to: Address,
    pub amount: BigUint,
    pub token: Option<TokenId>,
    pub pool_sink: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalTxn {
    pub from: Option<Address>,
    pub to: Address,
    pub amount: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventBody {
    Swap(Swap),
    Sync(Sync),
    Transfer(Transfer),
    InternalTxn(InternalTxn),
}

/// One decoded execution event. Kind-specific invariants are carried by [`EventBody`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub index: u32,
    pub body: EventBody,
}

impl TraceEvent {
    pub fn kind(&self) -> EventKind {
        match self.body {
            EventBody::Swap(_) => EventKind::Swap,
            EventBody::Sync(_) => EventKind::Sync,
            EventBody::Transfer(_) => EventKind::Transfer,
            EventBody::InternalTxn(_) => EventKind::InternalTxn,
        }
    }

    pub fn as_swap(&self) -> Option<&Swap> {
        match &self.body {
            EventBody::Swap(s) => Some(s),
            _ => None,
        }
    }

    pub fn pool_sink(&self) -> bool {
        match &self.body {
            EventBody::Swap(s) => s.pool_sink,
            EventBody::Transfer(t) => t.pool_sink,
            _ => false,
        }
    }

    /// Checks the kind-specific field invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        if let EventBody::Swap(s) = &self.body {
            if s.token_in == s.token_out {
                return Err(ModelError::SelfSwap(s.token_in.symbol.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub hash: TxHash,
    pub block_number: u64,
    pub initiator: Address,
    pub events: Vec<TraceEvent>,
    pub gas_used: BigUint,
    pub gas_price: BigUint,
    /// Block timestamp in unix seconds, when the trace carries one.
    pub timestamp: Option<i64>,
}

impl Transaction {
    pub fn new(
        hash: TxHash,
        block_number: u64,
        initiator: Address,
        events: Vec<TraceEvent>,
        gas_used: BigUint,
        gas_price: BigUint,
    ) -> Result<Self, ModelError> {
        let tx = Transaction { hash, block_number, initiator, events, gas_used, gas_price, timestamp: None };
        tx.validate()?;
        Ok(tx)
    }

    pub fn with_timestamp(mut self, ts: i64) -> Self {
        self.timestamp = Some(ts);
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for w in self.events.windows(2) {
            if w[1].index <= w[0].index {
                return Err(ModelError::EventOrder { prev: w[0].index, next: w[1].index });
            }
        }
        self.events.iter().try_for_each(TraceEvent::validate)
    }

    pub fn gas_cost(&self) -> BigUint {
        &self.gas_used * &self.gas_price
    }

    pub fn swaps(&self) -> impl Iterator<Item = &Swap> {
        self.events.iter().filter_map(TraceEvent::as_swap)
    }

    /// Every transfer in the transaction as `(event index, sender, transfer)`.
    pub fn transfers(&self) -> impl Iterator<Item = (u32, Address, &Transfer)> {
        self.events.iter().filter_map(move |e| match &e.body {
            EventBody::Transfer(t) => Some((e.index, t.from.unwrap_or(self.initiator), t)),
            _ => None,
        })
    }

    /// Flags trailing transfers into a pool already swapped against in this transaction as
    /// pool-sink deposits. Transfers that carry an explicit flag are left as they are.
    pub fn infer_pool_sinks(mut self) -> Self {
        let Some(last_swap) = self.events.iter().rposition(|e| e.kind() == EventKind::Swap) else {
            return self;
        };
        let pools: Vec<Address> = self.swaps().map(|s| s.pool).collect();
        for event in &mut self.events[last_swap + 1..] {
            if let EventBody::Transfer(t) = &mut event.body {
                if !t.pool_sink && pools.contains(&t.to) {
                    t.pool_sink = true;
                }
            }
        }
        self
    }
}
