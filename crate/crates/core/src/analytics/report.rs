//! CSV emitters. Percentages and dollar amounts are rendered at 2 dp, rounding halves away
//! from zero; other ratios at 6 dp.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{AnalyticsError, PathComplexity, ProfitMatrix, ProposerSplit, RiskScore, ShareTable, TrendResult};
use crate::num::format_fixed;

fn pct(r: &BigRational) -> String {
    format_fixed(&(r * BigRational::from_integer(BigInt::from(100))), 2)
}

fn usd(r: &BigRational) -> String {
    format_fixed(r, 2)
}

fn writer(out: impl Write) -> csv::Writer<impl Write> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn write_shares(table: &ShareTable, out: impl Write) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(["brand", "block_count", "validator_count", "share_pct", "cumulative_pct"])?;
    let mut cum = BigRational::default();
    for r in &table.rows {
        cum += &r.share;
        w.write_record([r.brand.clone(), r.block_count.to_string(), r.validator_count.to_string(), pct(&r.share), pct(&cum)])?;
    }
    w.flush()
}

pub fn write_profit_matrix(m: &ProfitMatrix, out: impl Write) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(["brand", "token", "net_usd", "token_share_pct"])?;
    for ((brand, token), v) in &m.cells {
        let share = m.builder_share(brand, token).map(|s| pct(&s)).unwrap_or_default();
        w.write_record([brand.clone(), token.clone(), usd(v), share])?;
    }
    for token in m.tokens() {
        w.write_record(["TOTAL", token, &usd(&m.token_total(token)), "100.00"])?;
    }
    w.write_record(["TOTAL", "ALL", &usd(&m.grand_total()), ""])?;
    w.flush()
}

pub fn write_proposer_split(split: &BTreeMap<String, ProposerSplit>, out: impl Write) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(["brand", "kept_usd", "paid_to_proposer_usd", "payout_pct", "profit_to_fee_ratio"])?;
    for (brand, s) in split {
        let ratio = super::profit_to_fee_ratio(&s.kept, &s.gas, &s.paid_to_proposer)
            .map(|r| format_fixed(&r, 6))
            .unwrap_or_default();
        w.write_record([brand.clone(), usd(&s.kept), usd(&s.paid_to_proposer), pct(&s.payout_fraction), ratio])?;
    }
    w.flush()
}

pub fn write_histogram(pc: &PathComplexity, out: impl Write) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(["hop_count", "cycles"])?;
    for (h, c) in &pc.histogram {
        w.write_record([h.to_string(), c.to_string()])?;
    }
    w.flush()
}

pub fn write_ecdf(pc: &PathComplexity, out: impl Write) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(["hop_count", "ecdf"])?;
    for (h, p) in &pc.ecdf {
        w.write_record([h.to_string(), format_fixed(p, 6)])?;
    }
    w.flush()
}

/// `(name, points, coefficient)`; an undefined coefficient is left blank.
pub fn write_correlations(rows: &[(String, usize, Result<f64, AnalyticsError>)], out: impl Write) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(["metric", "n", "pearson_r"])?;
    for (name, n, r) in rows {
        let v = r.as_ref().map(|r| format!("{r:.6}")).unwrap_or_default();
        w.write_record([name.clone(), n.to_string(), v])?;
    }
    w.flush()
}

pub fn write_trends(rows: &[(String, usize, Result<TrendResult, AnalyticsError>)], out: impl Write) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(["series", "n", "s", "variance", "z", "tau", "p_value", "alpha", "direction"])?;
    for (name, n, r) in rows {
        match r {
            Ok(t) => w.write_record([
                name.clone(),
                n.to_string(),
                t.s_statistic.to_string(),
                format_fixed(&t.variance, 6),
                format!("{:.6}", t.z_score),
                format_fixed(&t.tau, 6),
                format!("{:.6}", t.p_value),
                format!("{}", t.alpha),
                t.direction.as_str().to_string(),
            ])?,
            Err(_) => w.write_record([name.as_str(), &n.to_string(), "", "", "", "", "", "", "insufficient_data"])?,
        }
    }
    w.flush()
}

pub fn write_risk_scores(scores: &[RiskScore], out: impl Write) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(["token", "freezable", "custodial", "external_chain", "score"])?;
    for s in scores {
        let bit = |b: bool| if b { "1" } else { "0" }.to_string();
        w.write_record([
            s.token.symbol.clone(),
            bit(s.freezable),
            bit(s.custodial),
            bit(s.external_chain),
            format_fixed(&s.score, 6),
        ])?;
    }
    w.flush()
}

/// Creates `dir/name`, runs `f` on it and returns the path.
pub fn emit(dir: &Path, name: &str, f: impl FnOnce(&mut File) -> io::Result<()>) -> io::Result<PathBuf> {
    let path = dir.join(name);
    let mut file = File::create(&path)?;
    f(&mut file)?;
    Ok(path)
}
