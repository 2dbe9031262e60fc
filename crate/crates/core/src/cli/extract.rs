use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use tracing::{info, warn};

use super::records::{ArbitrageRecord, RecordWriter, UNKNOWN_BRAND};
use super::{create_dir, create_file, open_file, CliError, RunConfig};
use crate::arb::{
    amount_to_usd, attribute_profit, extract_arbitrage_cycle, to_usd, trace_flows, AddressCategory, ArbError,
    PriceTable, ShareAddresses, TxStore,
};
use crate::model::{bsc_builders, Address, LabelSet, ParseOptions, TraceReader, Transaction};
use crate::num::to_signed;

#[derive(Debug, Clone)]
pub struct ExtractOptions {
    pub traces: PathBuf,
    /// Builder label file; the bundled BSC builder list when absent.
    pub labels: Option<PathBuf>,
    pub config: RunConfig,
    pub out_dir: PathBuf,
    /// Also trace where each arbitrage's proceeds went, up to `config.k_hops` transfers.
    pub flows: bool,
    pub categories: Option<PathBuf>,
    pub infer_pool_sink: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractReport {
    pub transactions: usize,
    pub records: usize,
    pub non_cycles: usize,
    pub error_rows: usize,
    pub skipped_events: usize,
}

/// Reads `address,category` rows (no header required; `#` starts a comment).
pub fn read_categories(path: &Path) -> Result<HashMap<Address, AddressCategory>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(open_file(path)?);
    let mut out = HashMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(CliError::csv)?;
        let (a, c) = (row.get(0).unwrap_or(""), row.get(1).unwrap_or(""));
        if i == 0 && a.eq_ignore_ascii_case("address") {
            continue;
        }
        let bad = |m: String| CliError::Config(format!("{} row {}: {m}", path.display(), i + 1));
        let addr: Address = a.parse().map_err(|e: crate::model::ModelError| bad(e.to_string()))?;
        out.insert(addr, c.parse().map_err(bad)?);
    }
    Ok(out)
}

struct Context<'a> {
    labels: &'a LabelSet,
    shares: ShareAddresses,
    prices: PriceTable,
}

impl Context<'_> {
    fn record(&self, tx: &Transaction) -> Result<Option<ArbitrageRecord>, ArbError> {
        let Some(cycle) = extract_arbitrage_cycle(tx) else {
            return Ok(None);
        };
        let b = attribute_profit(tx, &cycle, &self.shares, &self.prices)?;
        let usd_value = to_usd(&b, &self.prices)?;
        let share_usd = amount_to_usd(&to_signed(&b.share), &b.base_token, &self.prices)?;
        let gas_usd = amount_to_usd(&to_signed(&b.gas_in_base), &b.base_token, &self.prices)?;
        let brand = self.labels.label_builder(&tx.initiator).map_or(UNKNOWN_BRAND, |l| l.brand.as_str());
        Ok(Some(ArbitrageRecord {
            tx_hash: tx.hash,
            block_number: tx.block_number,
            builder_brand: brand.to_string(),
            base_token: b.base_token.symbol.clone(),
            hop_count: cycle.hop_count(),
            path: cycle.render_path(),
            gross: b.gross,
            share: b.share,
            gas: b.gas_in_base,
            net: b.net,
            usd_value,
            share_usd,
            gas_usd,
            timestamp: tx.timestamp,
        }))
    }
}

struct Sinks<W: Write, E: Write> {
    records: RecordWriter<W>,
    errors: csv::Writer<E>,
    report: ExtractReport,
}

impl<W: Write, E: Write> Sinks<W, E> {
    fn error(&mut self, line: usize, tx: &str, message: &str) -> Result<(), CliError> {
        self.report.error_rows += 1;
        warn!(line, tx, message, "error row");
        self.errors.write_record([&line.to_string(), tx, message]).map_err(CliError::csv)
    }

    fn handle(&mut self, ctx: &Context, line: usize, tx: &Transaction) -> Result<(), CliError> {
        self.report.transactions += 1;
        match ctx.record(tx) {
            Ok(Some(r)) => {
                self.report.records += 1;
                self.records.write(&r)
            }
            Ok(None) => {
                self.report.non_cycles += 1;
                Ok(())
            }
            Err(e) => self.error(line, &tx.hash.to_string(), &e.to_string()),
        }
    }
}

/// Parses traces, extracts cycles, attributes profit and writes `records.csv` and `errors.csv`
/// (plus `flows.csv` when requested) into the output directory.
///
/// Without flow tracing the trace file is streamed one transaction at a time.
pub fn cmd_extract(opts: &ExtractOptions) -> Result<ExtractReport, CliError> {
    let labels = match &opts.labels {
        Some(p) => LabelSet::from_csv(open_file(p)?)?,
        None => bsc_builders(),
    };
    let categories = match &opts.categories {
        Some(p) => read_categories(p)?,
        None => HashMap::new(),
    };
    create_dir(&opts.out_dir)?;
    let ctx = Context { labels: &labels, shares: opts.config.share_set(), prices: opts.config.prices() };

    let mut errors = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(create_file(&opts.out_dir.join("errors.csv"))?);
    errors.write_record(["line", "tx_hash", "error"]).map_err(CliError::csv)?;
    let mut sinks = Sinks {
        records: RecordWriter::new(create_file(&opts.out_dir.join("records.csv"))?)?,
        errors,
        report: ExtractReport::default(),
    };

    let mut reader = TraceReader::with_options(
        open_file(&opts.traces)?,
        ParseOptions { infer_pool_sink: opts.infer_pool_sink },
    );
    let mut kept: Vec<(usize, Transaction)> = Vec::new();
    while let Some(item) = reader.next() {
        let line = reader.line();
        match item {
            Ok(tx) if opts.flows => kept.push((line, tx)),
            Ok(tx) => sinks.handle(&ctx, line, &tx)?,
            Err(e) => sinks.error(e.line(), "", &e.to_string())?,
        }
    }
    sinks.report.skipped_events = reader.skipped_events();

    if opts.flows {
        for (line, tx) in &kept {
            sinks.handle(&ctx, *line, tx)?;
        }
        let store = TxStore::new(kept.into_iter().map(|(_, t)| t).collect());
        write_flows(&store, opts.config.k_hops, &categories, create_file(&opts.out_dir.join("flows.csv"))?)?;
    }
    sinks.records.finish()?;
    sinks.errors.flush().map_err(CliError::Write)?;
    info!(?sinks.report, "extract finished");
    Ok(sinks.report)
}

fn write_flows(
    store: &TxStore,
    k: u32,
    categories: &HashMap<Address, AddressCategory>,
    out: impl Write,
) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["seed_tx", "hop", "from", "from_category", "to", "to_category", "token", "amount", "tx_hash", "event_index"])
        .map_err(CliError::csv)?;
    for seed in store.transactions() {
        if extract_arbitrage_cycle(seed).is_none() {
            continue;
        }
        let g = trace_flows(seed, store, k, categories);
        for e in &g.edges {
            w.write_record([
                seed.hash.to_string(),
                e.hop.to_string(),
                e.from.to_string(),
                g.nodes[&e.from].to_string(),
                e.to.to_string(),
                g.nodes[&e.to].to_string(),
                e.token.as_ref().map_or_else(|| "native".to_string(), |t| t.symbol.clone()),
                e.amount.to_string(),
                e.tx_hash.to_string(),
                e.event_index.to_string(),
            ])
            .map_err(CliError::csv)?;
        }
    }
    w.flush().map_err(CliError::Write)
}

/// Reads every record-producing transaction from an in-memory trace stream. Used by tests and
/// the FFI layer; errors become `Err` entries in input order.
pub fn extract_stream(
    input: impl BufRead,
    config: &RunConfig,
    labels: &LabelSet,
) -> (Vec<Result<ArbitrageRecord, String>>, ExtractReport) {
    let ctx = Context { labels, shares: config.share_set(), prices: config.prices() };
    let mut reader = TraceReader::new(input);
    let mut out = Vec::new();
    let mut report = ExtractReport::default();
    for item in reader.by_ref() {
        match item {
            Ok(tx) => {
                report.transactions += 1;
                match ctx.record(&tx) {
                    Ok(Some(r)) => {
                        report.records += 1;
                        out.push(Ok(r));
                    }
                    Ok(None) => report.non_cycles += 1,
                    Err(e) => {
                        report.error_rows += 1;
                        out.push(Err(format!("{}: {e}", tx.hash)));
                    }
                }
            }
            Err(e) => {
                report.error_rows += 1;
                out.push(Err(e.to_string()));
            }
        }
    }
    report.skipped_events = reader.skipped_events();
    (out, report)
}

/// Extracts records from already-parsed transactions, in order. Errors carry the tx hash.
pub fn extract_transactions(
    txs: &[Transaction],
    config: &RunConfig,
    labels: &LabelSet,
) -> Vec<Result<Option<ArbitrageRecord>, String>> {
    let ctx = Context { labels, shares: config.share_set(), prices: config.prices() };
    txs.iter().map(|tx| ctx.record(tx).map_err(|e| format!("{}: {e}", tx.hash))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arb::fixtures::worked_trace;
    use crate::model::write_trace_file;

    #[test]
    fn worked_trace_stream() {
        let mut buf = Vec::new();
        write_trace_file(&mut buf, &[worked_trace()]).unwrap();
        let (rows, report) = extract_stream(buf.as_slice(), &RunConfig::default(), &bsc_builders());
        assert_eq!(report.records, 1);
        let r = rows[0].as_ref().unwrap();
        assert_eq!(r.path, "USDT->WBNB->USD1->USDT");
        assert_eq!((r.gross.to_string(), r.share.to_string(), r.net.to_string()), ("3040".into(), "820".into(), "2220".into()));
        assert_eq!(r.builder_brand, "48Club");
    }

    #[test]
    fn missing_price_becomes_error_row() {
        let mut cfg = RunConfig::default();
        cfg.price_table.remove("USDT");
        let mut buf = Vec::new();
        write_trace_file(&mut buf, &[worked_trace()]).unwrap();
        let (rows, report) = extract_stream(buf.as_slice(), &cfg, &bsc_builders());
        assert_eq!(report.error_rows, 1);
        assert!(rows[0].as_ref().unwrap_err().contains("USDT"));
    }
}
