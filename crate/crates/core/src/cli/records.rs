//! Arbitrage record files: one row per extracted cycle.
//!
//! The first line is a schema marker, then a CSV header:
//!
//! ```text
//! # schema=mevforge-arbitrage-records/1
//! tx_hash,block_number,builder_brand,base_token,hop_count,path,gross,share,gas,net,usd_value,share_usd,gas_usd,timestamp_utc
//! ```
//!
//! `gross`, `share`, `gas` and `net` are base units of `base_token` with `net = gross − share −
//! gas`. The three USD columns are exact decimals. `timestamp_utc` is RFC 3339 or empty.

use std::io::{BufRead, Write};

use chrono::{DateTime, SecondsFormat};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use super::CliError;
use crate::model::TxHash;
use crate::num::{format_rational, parse_decimal, to_signed};

pub const RECORDS_SCHEMA: &str = "# schema=mevforge-arbitrage-records/1";

pub const RECORD_COLUMNS: [&str; 14] = [
    "tx_hash",
    "block_number",
    "builder_brand",
    "base_token",
    "hop_count",
    "path",
    "gross",
    "share",
    "gas",
    "net",
    "usd_value",
    "share_usd",
    "gas_usd",
    "timestamp_utc",
];

/// Brand recorded for transactions whose sender carries no builder label.
pub const UNKNOWN_BRAND: &str = "Unknown";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArbitrageRecord {
    pub tx_hash: TxHash,
    pub block_number: u64,
    pub builder_brand: String,
    pub base_token: String,
    pub hop_count: usize,
    pub path: String,
    pub gross: BigInt,
    pub share: BigUint,
    pub gas: BigUint,
    pub net: BigInt,
    /// Net profit in dollars.
    pub usd_value: BigRational,
    pub share_usd: BigRational,
    pub gas_usd: BigRational,
    /// Unix seconds.
    pub timestamp: Option<i64>,
}

impl ArbitrageRecord {
    pub fn is_balanced(&self) -> bool {
        self.net == &self.gross - to_signed(&self.share) - to_signed(&self.gas)
    }

    fn fields(&self) -> [String; 14] {
        [
            self.tx_hash.to_string(),
            self.block_number.to_string(),
            self.builder_brand.clone(),
            self.base_token.clone(),
            self.hop_count.to_string(),
            self.path.clone(),
            self.gross.to_string(),
            self.share.to_string(),
            self.gas.to_string(),
            self.net.to_string(),
            format_rational(&self.usd_value),
            format_rational(&self.share_usd),
            format_rational(&self.gas_usd),
            self.timestamp
                .and_then(|t| DateTime::from_timestamp(t, 0))
                .map(|d| d.to_rfc3339_opts(SecondsFormat::Secs, true))
                .unwrap_or_default(),
        ]
    }
}

/// Streams records out: schema line and header first, then one row per `write`.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(mut out: W) -> Result<Self, CliError> {
        writeln!(out, "{RECORDS_SCHEMA}").map_err(CliError::Write)?;
        let mut inner = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        inner.write_record(RECORD_COLUMNS).map_err(CliError::csv)?;
        Ok(RecordWriter { inner })
    }

    pub fn write(&mut self, r: &ArbitrageRecord) -> Result<(), CliError> {
        self.inner.write_record(r.fields()).map_err(CliError::csv)
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush().map_err(CliError::Write)
    }
}

fn row_error(row: usize, message: impl Into<String>) -> CliError {
    CliError::Schema { row, message: message.into() }
}

/// Reads a record file. `row` in errors is the 1-based line number in the file.
pub fn read_records(mut input: impl BufRead) -> Result<Vec<ArbitrageRecord>, CliError> {
    let mut first = String::new();
    input.read_line(&mut first).map_err(CliError::Write)?;
    if first.trim_end() != RECORDS_SCHEMA {
        return Err(row_error(1, format!("expected schema line {RECORDS_SCHEMA:?}")));
    }
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers().map_err(|e| row_error(2, e.to_string()))?.clone();
    if header.iter().ne(RECORD_COLUMNS) {
        return Err(row_error(2, format!("expected columns {}", RECORD_COLUMNS.join(","))));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 3;
        let row = row.map_err(|e| row_error(line, e.to_string()))?;
        let get = |k: usize| row.get(k).unwrap_or("");
        let bad = |col: &str| row_error(line, format!("invalid {col}"));
        let int = |k: usize| get(k).parse::<BigInt>().map_err(|_| bad(RECORD_COLUMNS[k]));
        let uint = |k: usize| get(k).parse::<BigUint>().map_err(|_| bad(RECORD_COLUMNS[k]));
        let dec = |k: usize| parse_decimal(get(k)).map_err(|_| bad(RECORD_COLUMNS[k]));
        let timestamp = match get(13) {
            "" => None,
            s => Some(DateTime::parse_from_rfc3339(s).map_err(|_| bad("timestamp_utc"))?.timestamp()),
        };
        let rec = ArbitrageRecord {
            tx_hash: get(0).parse().map_err(|_| bad("tx_hash"))?,
            block_number: get(1).parse().map_err(|_| bad("block_number"))?,
            builder_brand: get(2).to_string(),
            base_token: get(3).to_string(),
            hop_count: get(4).parse().map_err(|_| bad("hop_count"))?,
            path: get(5).to_string(),
            gross: int(6)?,
            share: uint(7)?,
            gas: uint(8)?,
            net: int(9)?,
            usd_value: dec(10)?,
            share_usd: dec(11)?,
            gas_usd: dec(12)?,
            timestamp,
        };
        if rec.builder_brand.is_empty() || rec.base_token.is_empty() {
            return Err(row_error(line, "empty builder_brand or base_token"));
        }
        if !rec.is_balanced() {
            return Err(row_error(line, "net differs from gross - share - gas"));
        }
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::ratio;

    pub(crate) fn sample(i: u64) -> ArbitrageRecord {
        ArbitrageRecord {
            tx_hash: TxHash::from_low_u64(i),
            block_number: 100 + i,
            builder_brand: "48Club".into(),
            base_token: "USDT".into(),
            hop_count: 3,
            path: "USDT->WBNB->USD1->USDT".into(),
            gross: 3040.into(),
            share: 820u32.into(),
            gas: 0u32.into(),
            net: 2220.into(),
            usd_value: ratio(2220, 1000),
            share_usd: ratio(82, 100),
            gas_usd: ratio(0, 1),
            timestamp: Some(1_764_115_200 + i as i64),
        }
    }

    #[test]
    fn round_trip() {
        let mut buf = Vec::new();
        let mut w = RecordWriter::new(&mut buf).unwrap();
        w.write(&sample(1)).unwrap();
        w.write(&sample(2)).unwrap();
        w.finish().unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(RECORDS_SCHEMA));
        assert!(text.contains(",2.22,0.82,0,2025-11-26T00:00:01Z"));
        assert_eq!(read_records(buf.as_slice()).unwrap(), vec![sample(1), sample(2)]);
    }

    #[test]
    fn schema_errors_carry_rows() {
        assert!(matches!(read_records("tx_hash\n".as_bytes()), Err(CliError::Schema { row: 1, .. })));
        let mut buf = Vec::new();
        let mut w = RecordWriter::new(&mut buf).unwrap();
        w.write(&sample(1)).unwrap();
        let mut bad = sample(2);
        bad.net = 1.into();
        w.write(&bad).unwrap();
        w.finish().unwrap();
        assert!(matches!(read_records(buf.as_slice()), Err(CliError::Schema { row: 4, .. })));
    }
}
