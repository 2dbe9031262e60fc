use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use tracing::info;

use super::records::{read_records, ArbitrageRecord, UNKNOWN_BRAND};
use super::{create_dir, open_file, CliError, RunConfig};
use crate::analytics::report::{self, emit};
use crate::analytics::{
    daily_series, mann_kendall, market_share, path_complexity, pathlen_profit_correlation, profit_matrix,
    proposer_split, risk_score, AnalyticsError, ProfitEntry, ShareTable,
};
use crate::arb::fixtures::token;

pub const REPORT_FILES: [&str; 8] = [
    "shares.csv",
    "profit_matrix.csv",
    "proposer_split.csv",
    "path_histogram.csv",
    "path_ecdf.csv",
    "correlations.csv",
    "trends.csv",
    "risk_scores.csv",
];

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub records: PathBuf,
    pub config: RunConfig,
    pub out_dir: PathBuf,
    /// `brand,block_count[,validator_count]`. Without it, shares count distinct record blocks.
    pub block_counts: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzeReport {
    pub records: usize,
    pub files: Vec<PathBuf>,
}

type Counts = (BTreeMap<String, u64>, BTreeMap<String, u64>);

pub fn read_block_counts(path: &Path) -> Result<Counts, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(open_file(path)?);
    let (mut blocks, mut validators) = (BTreeMap::new(), BTreeMap::new());
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(CliError::csv)?;
        let bad = |m: &str| CliError::Schema { row: i + 2, message: m.to_string() };
        let brand = row.get(0).filter(|b| !b.is_empty()).ok_or_else(|| bad("missing brand"))?;
        let n: u64 = row.get(1).and_then(|v| v.parse().ok()).ok_or_else(|| bad("bad block_count"))?;
        blocks.insert(brand.to_string(), n);
        if let Some(v) = row.get(2).filter(|v| !v.is_empty()) {
            validators.insert(brand.to_string(), v.parse().map_err(|_| bad("bad validator_count"))?);
        }
    }
    Ok((blocks, validators))
}

fn record_block_counts(records: &[ArbitrageRecord]) -> BTreeMap<String, u64> {
    let mut blocks: BTreeMap<&str, BTreeSet<u64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.builder_brand != UNKNOWN_BRAND) {
        blocks.entry(&r.builder_brand).or_default().insert(r.block_number);
    }
    blocks.into_iter().map(|(b, s)| (b.to_string(), s.len() as u64)).collect()
}

fn trend_rows(records: &[ArbitrageRecord], alpha: f64) -> Vec<(String, usize, Result<crate::analytics::TrendResult, AnalyticsError>)> {
    let timed: Vec<&ArbitrageRecord> = records.iter().filter(|r| r.timestamp.is_some()).collect();
    let mut rows = Vec::new();
    let mut push = |name: String, points: Vec<(i64, BigRational)>| {
        let series: Vec<BigRational> = daily_series(points).into_iter().map(|(_, v)| v).collect();
        rows.push((name, series.len(), mann_kendall(&series, alpha)));
    };
    push("daily_net_usd:ALL".into(), timed.iter().map(|r| (r.timestamp.unwrap(), r.usd_value.clone())).collect());
    push("daily_count:ALL".into(), timed.iter().map(|r| (r.timestamp.unwrap(), BigRational::one())).collect());
    let brands: BTreeSet<&str> = timed.iter().map(|r| r.builder_brand.as_str()).collect();
    for b in brands {
        push(
            format!("daily_net_usd:{b}"),
            timed.iter().filter(|r| r.builder_brand == b).map(|r| (r.timestamp.unwrap(), r.usd_value.clone())).collect(),
        );
    }
    rows
}

/// Reads a record file and writes every report in [`REPORT_FILES`] to the output directory.
/// Reports depend only on the multiset of records, not their order.
pub fn cmd_analyze(opts: &AnalyzeOptions) -> Result<AnalyzeReport, CliError> {
    let mut records = read_records(open_file(&opts.records)?)?;
    records.sort_by(|a, b| a.tx_hash.cmp(&b.tx_hash).then_with(|| a.block_number.cmp(&b.block_number)));
    create_dir(&opts.out_dir)?;
    let dir = opts.out_dir.as_path();
    let wr = |r: std::io::Result<PathBuf>| r.map_err(|e| CliError::io(dir, e));
    let mut files = Vec::new();

    let (blocks, validators) = match &opts.block_counts {
        Some(p) => read_block_counts(p)?,
        None => (record_block_counts(&records), BTreeMap::new()),
    };
    let shares = match market_share(&blocks) {
        Ok(t) => t.with_validator_counts(&validators),
        Err(_) => ShareTable::default(),
    };
    files.push(wr(emit(dir, REPORT_FILES[0], |f| report::write_shares(&shares, f)))?);

    let entries: Vec<ProfitEntry> = records
        .iter()
        .map(|r| ProfitEntry {
            brand: r.builder_brand.clone(),
            token: r.base_token.clone(),
            net_usd: r.usd_value.clone(),
            share_usd: r.share_usd.clone(),
            gas_usd: r.gas_usd.clone(),
        })
        .collect();
    let matrix = profit_matrix(&entries);
    files.push(wr(emit(dir, REPORT_FILES[1], |f| report::write_profit_matrix(&matrix, f)))?);
    let split = proposer_split(&entries);
    files.push(wr(emit(dir, REPORT_FILES[2], |f| report::write_proposer_split(&split, f)))?);

    let pc = path_complexity(records.iter().map(|r| r.hop_count));
    files.push(wr(emit(dir, REPORT_FILES[3], |f| report::write_histogram(&pc, f)))?);
    files.push(wr(emit(dir, REPORT_FILES[4], |f| report::write_ecdf(&pc, f)))?);

    let points: Vec<(BigRational, BigRational)> = records
        .iter()
        .filter(|r| r.hop_count > 0)
        .map(|r| {
            let h = BigRational::from_integer(BigInt::from(r.hop_count));
            (h.clone(), &r.usd_value / h)
        })
        .collect();
    let corr = vec![("hop_count_vs_usd_per_hop".to_string(), points.len(), pathlen_profit_correlation(&points))];
    files.push(wr(emit(dir, REPORT_FILES[5], |f| report::write_correlations(&corr, f)))?);

    let trends = trend_rows(&records, opts.config.alpha);
    files.push(wr(emit(dir, REPORT_FILES[6], |f| report::write_trends(&trends, f)))?);

    let risks: Vec<_> = opts.config.risk.iter().map(|(s, b)| risk_score(token(s), b[0], b[1], b[2])).collect();
    files.push(wr(emit(dir, REPORT_FILES[7], |f| report::write_risk_scores(&risks, f)))?);

    info!(records = records.len(), "analyze finished");
    Ok(AnalyzeReport { records: records.len(), files })
}
