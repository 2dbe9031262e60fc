//! Newline-delimited JSON trace format: one transaction object per line.
//!
//! ```text
//! {"hash":"0x…","block":1,"from":"0x…","gas_used":"21000","gas_price":"0","events":[
//!   {"index":0,"kind":"swap","pool":"0x…","token_in":{…},"token_out":{…},"amount_in":"1000000","amount_out":"2980000000000000000"},
//!   {"index":3,"kind":"transfer","to":"0xffff…fffe","amount":"820"}]}
//! ```
//!
//! Amounts are decimal strings in token base units. Unknown event kinds are skipped and counted.

use std::fmt;
use std::io::{self, BufRead, Write};

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::{
    Address, EventBody, EventKind, InternalTxn, Swap, Sync, TokenId, TraceEvent, Transaction, Transfer, TxHash,
};
use crate::num::parse_uint;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("read error at line {line}: {source}")]
    Io { line: usize, source: io::Error },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Malformed { line, .. } | ParseError::Io { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Flag trailing transfers into already-touched pools as pool-sink deposits.
    pub infer_pool_sink: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Amount(pub(crate) BigUint);

impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(u64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => parse_uint(&s).map(Amount).map_err(serde::de::Error::custom),
            Repr::Int(v) => Ok(Amount(BigUint::from(v))),
        }
    }
}

#[derive(Deserialize)]
struct WireTx {
    hash: TxHash,
    block: u64,
    from: Address,
    gas_used: Amount,
    gas_price: Amount,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    timestamp: Option<i64>,
    #[serde(default)]
    events: Vec<serde_json::Value>,
}

#[derive(Serialize)]
struct WireTxOut {
    hash: TxHash,
    block: u64,
    from: Address,
    gas_used: Amount,
    gas_price: Amount,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<i64>,
    events: Vec<WireEvent>,
}

#[derive(Serialize, Deserialize, Default)]
struct WireEvent {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<u32>,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pool: Option<Address>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    token_in: Option<TokenId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    token_out: Option<TokenId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amount_in: Option<Amount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amount_out: Option<Amount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    from: Option<Address>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    to: Option<Address>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    token: Option<TokenId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amount: Option<Amount>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pool_sink: bool,
}

struct Missing(&'static str, EventKind);

impl fmt::Display for Missing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} event missing `{}`", self.1.wire_name(), self.0)
    }
}

fn need<T>(v: Option<T>, field: &'static str, kind: EventKind) -> Result<T, String> {
    v.ok_or_else(|| Missing(field, kind).to_string())
}

fn decode_event(w: WireEvent, kind: EventKind, index: u32) -> Result<TraceEvent, String> {
    let body = match kind {
        EventKind::Swap => EventBody::Swap(Swap {
            pool: need(w.pool, "pool", kind)?,
            token_in: need(w.token_in, "token_in", kind)?,
            token_out: need(w.token_out, "token_out", kind)?,
            amount_in: need(w.amount_in, "amount_in", kind)?.0,
            amount_out: need(w.amount_out, "amount_out", kind)?.0,
            to: w.to,
            pool_sink: w.pool_sink,
            routed: w.amount.map(|a| a.0),
        }),
        EventKind::Sync => EventBody::Sync(Sync { pool: w.pool }),
        EventKind::Transfer => EventBody::Transfer(Transfer {
            from: w.from,
            to: need(w.to, "to", kind)?,
            amount: need(w.amount, "amount", kind)?.0,
            token: w.token,
            pool_sink: w.pool_sink,
        }),
        EventKind::InternalTxn => EventBody::InternalTxn(InternalTxn {
            from: w.from,
            to: need(w.to, "to", kind)?,
            amount: need(w.amount, "amount", kind)?.0,
        }),
    };
    let event = TraceEvent { index, body };
    event.validate().map_err(|e| e.to_string())?;
    Ok(event)
}

fn encode_event(e: &TraceEvent) -> WireEvent {
    let mut w = WireEvent { index: Some(e.index), kind: e.kind().wire_name().to_string(), ..Default::default() };
    match &e.body {
        EventBody::Swap(s) => {
            w.pool = Some(s.pool);
            w.token_in = Some(s.token_in.clone());
            w.token_out = Some(s.token_out.clone());
            w.amount_in = Some(Amount(s.amount_in.clone()));
            w.amount_out = Some(Amount(s.amount_out.clone()));
            w.to = s.to;
            w.pool_sink = s.pool_sink;
            w.amount = s.routed.clone().map(Amount);
        }
        EventBody::Sync(s) => w.pool = s.pool,
        EventBody::Transfer(t) => {
            w.from = t.from;
            w.to = Some(t.to);
            w.token = t.token.clone();
            w.amount = Some(Amount(t.amount.clone()));
            w.pool_sink = t.pool_sink;
        }
        EventBody::InternalTxn(t) => {
            w.from = t.from;
            w.to = Some(t.to);
            w.amount = Some(Amount(t.amount.clone()));
        }
    }
    w
}

/// Decodes one record. Returns the transaction and the number of skipped unknown events.
fn decode_line(text: &str) -> Result<(Transaction, usize), String> {
    let raw: WireTx = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut events = Vec::with_capacity(raw.events.len());
    let mut skipped = 0usize;
    for (pos, value) in raw.events.into_iter().enumerate() {
        let kind_name = value
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| format!("event {pos} has no string `kind`"))?;
        let Some(kind) = EventKind::from_wire(kind_name) else {
            tracing::warn!(kind = kind_name, event = pos, "skipping unknown event kind");
            skipped += 1;
            continue;
        };
        let wire: WireEvent = serde_json::from_value(value).map_err(|e| format!("event {pos}: {e}"))?;
        let index = match wire.index {
            Some(i) => i,
            None => u32::try_from(pos).map_err(|_| "too many events".to_string())?,
        };
        events.push(decode_event(wire, kind, index).map_err(|e| format!("event {pos}: {e}"))?);
    }
    let tx = Transaction {
        hash: raw.hash,
        block_number: raw.block,
        initiator: raw.from,
        events,
        gas_used: raw.gas_used.0,
        gas_price: raw.gas_price.0,
        timestamp: raw.timestamp,
    };
    tx.validate().map_err(|e| e.to_string())?;
    Ok((tx, skipped))
}

/// Streaming reader over a trace file; yields one transaction per non-blank line.
pub struct TraceReader<R> {
    lines: io::Lines<R>,
    line: usize,
    skipped_events: usize,
    options: ParseOptions,
}

impl<R: BufRead> TraceReader<R> {
    pub fn new(reader: R) -> Self {
        Self::with_options(reader, ParseOptions::default())
    }

    pub fn with_options(reader: R, options: ParseOptions) -> Self {
        TraceReader { lines: reader.lines(), line: 0, skipped_events: 0, options }
    }

    /// Events dropped so far because their kind was not recognised.
    pub fn skipped_events(&self) -> usize {
        self.skipped_events
    }

    pub fn line(&self) -> usize {
        self.line
    }
}

impl<R: BufRead> Iterator for TraceReader<R> {
    type Item = Result<Transaction, ParseError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let text = match self.lines.next()? {
                Ok(t) => t,
                Err(source) => return Some(Err(ParseError::Io { line: self.line + 1, source })),
            };
            self.line += 1;
            if text.trim().is_empty() {
                continue;
            }
            return Some(match decode_line(&text) {
                Ok((tx, skipped)) => {
                    self.skipped_events += skipped;
                    Ok(if self.options.infer_pool_sink { tx.infer_pool_sinks() } else { tx })
                }
                Err(message) => Err(ParseError::Malformed { line: self.line, message }),
            });
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedTraces {
    pub transactions: Vec<Transaction>,
    pub skipped_events: usize,
}

/// Parses a whole trace stream, stopping at the first malformed record.
pub fn parse_trace_file<R: BufRead>(stream: R) -> Result<ParsedTraces, ParseError> {
    let mut reader = TraceReader::new(stream);
    let transactions = reader.by_ref().collect::<Result<Vec<_>, _>>()?;
    Ok(ParsedTraces { transactions, skipped_events: reader.skipped_events() })
}

pub fn write_transaction<W: Write>(out: &mut W, tx: &Transaction) -> io::Result<()> {
    let wire = WireTxOut {
        hash: tx.hash,
        block: tx.block_number,
        from: tx.initiator,
        gas_used: Amount(tx.gas_used.clone()),
        gas_price: Amount(tx.gas_price.clone()),
        timestamp: tx.timestamp,
        events: tx.events.iter().map(encode_event).collect(),
    };
    serde_json::to_writer(&mut *out, &wire)?;
    out.write_all(b"\n")
}

pub fn write_trace_file<W: Write>(mut out: W, txs: &[Transaction]) -> io::Result<()> {
    for tx in txs {
        write_transaction(&mut out, tx)?;
    }
    out.flush()
}
