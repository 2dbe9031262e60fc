use std::collections::BTreeMap;
use std::io::{self, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{run_slot_bsc, run_slot_eth, Blacklist, Protocol, Scenario, SimError, SlotEnv, SlotOutcome};
use crate::num::format_fixed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryRow {
    pub builder_id: String,
    pub wins: u64,
    pub win_share: BigRational,
    pub profit: i128,
    pub profit_share: BigRational,
    pub proposer_revenue: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    pub slots: u64,
    /// One row per builder, in id order.
    pub rows: Vec<SummaryRow>,
    pub fallback_slots: u64,
    pub fallback_rate: BigRational,
}

#[derive(Debug, Clone)]
pub struct Campaign {
    pub outcomes: Vec<SlotOutcome>,
    pub summary: Summary,
}

/// Runs `n_slots` consecutive slots. Proposers take turns (`height mod count`) and each keeps
/// its own blacklist.
pub fn run_campaign(scenario: &Scenario, n_slots: u64, seed: u64) -> Result<Campaign, SimError> {
    if n_slots == 0 {
        return Err(SimError::Config(vec!["slots".into()]));
    }
    let count = u64::from(scenario.proposers.count.max(1));
    let mut blacklists = vec![Blacklist::default(); count as usize];
    let mut outcomes = Vec::with_capacity(n_slots as usize);
    for height in 0..n_slots {
        let mut opportunity = scenario.opportunity.clone();
        if let Some(e) = &scenario.embodied {
            opportunity.peak_value = e.peak_for(seed, height)?;
        }
        let env = SlotEnv { height, builders: &scenario.builders, opportunity: &opportunity, timing: &scenario.timing, seed };
        let out = match scenario.protocol {
            Protocol::BscDirect => {
                run_slot_bsc(&env, &scenario.proposers, &mut blacklists[(height % count) as usize])?
            }
            Protocol::EthRelay => run_slot_eth(&env, &scenario.relay)?,
        };
        outcomes.push(out);
    }
    let summary = summarize(scenario, &outcomes);
    Ok(Campaign { outcomes, summary })
}

fn summarize(scenario: &Scenario, outcomes: &[SlotOutcome]) -> Summary {
    let mut acc: BTreeMap<&str, (u64, i128, u128)> = scenario.builders.iter().map(|b| (b.id.as_str(), (0, 0, 0))).collect();
    let mut fallback = 0u64;
    for o in outcomes {
        match &o.winner {
            Some(w) => {
                let e = acc.get_mut(w.as_str()).expect("winner is a scenario builder");
                e.0 += 1;
                e.1 += o.realized_builder_profit;
                e.2 += o.proposer_payment;
            }
            None => fallback += 1,
        }
    }
    let n = outcomes.len() as u64;
    let total_profit: i128 = acc.values().map(|v| v.1).sum();
    let frac = |a: BigInt, b: BigInt| if b.is_zero() { BigRational::zero() } else { BigRational::new(a, b) };
    let rows = acc
        .into_iter()
        .map(|(id, (wins, profit, revenue))| SummaryRow {
            builder_id: id.to_string(),
            wins,
            win_share: frac(wins.into(), n.into()),
            profit,
            profit_share: frac(profit.into(), total_profit.into()),
            proposer_revenue: revenue,
        })
        .collect();
    Summary { slots: n, rows, fallback_slots: fallback, fallback_rate: frac(fallback.into(), n.into()) }
}

/// Summary CSV. The trailing `fallback` row counts slots without a builder block, so the
/// `win_share` column sums to one.
pub fn write_summary(summary: &Summary, out: impl Write) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["builder_id", "wins", "win_share", "profit", "profit_share", "proposer_revenue"])?;
    for r in &summary.rows {
        w.write_record([
            r.builder_id.clone(),
            r.wins.to_string(),
            format_fixed(&r.win_share, 6),
            r.profit.to_string(),
            format_fixed(&r.profit_share, 6),
            r.proposer_revenue.to_string(),
        ])?;
    }
    w.write_record([
        "fallback".to_string(),
        summary.fallback_slots.to_string(),
        format_fixed(&summary.fallback_rate, 6),
        "0".into(),
        format_fixed(&BigRational::zero(), 6),
        "0".into(),
    ])?;
    w.flush()
}

/// One JSON object per slot.
pub fn write_slot_log(outcomes: &[SlotOutcome], mut out: impl Write) -> io::Result<()> {
    for o in outcomes {
        serde_json::to_writer(&mut out, o)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
