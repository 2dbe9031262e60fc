use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mevforge::amm::{arbitrage_run, swap_v2, PoolSet, PoolState, RunOutcome, RunParams};
use mevforge::analytics::{
    mann_kendall, market_share, path_complexity, pathlen_profit_correlation, profit_matrix, risk_score, ProfitEntry,
};
use mevforge::arb::fixtures::token;
use mevforge::arb::{attribute_profit, extract_arbitrage_cycle, trace_flows, TxStore};
use mevforge::cli::generate::generate_traces;
use mevforge::cli::RunConfig;
use mevforge::model::{parse_trace_file, write_trace_file, Address, EventBody, TraceEvent, Transaction, Transfer, TxHash};
use mevforge::sim::{
    run_campaign, run_slot_bsc, run_slot_eth, Blacklist, BuilderAgent, Decay, OpportunityModel, ProposerConfig,
    RelayConfig, Scenario, SlotEnv, Timing,
};
use mevforge::sim::Ms;

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn ms(v: i64) -> Ms {
    Ms::from_integer(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_codec_round_trips(seed in any::<u64>(), n in 1usize..25) {
        let (txs, _) = generate_traces(seed, n);
        let mut first = Vec::new();
        write_trace_file(&mut first, &txs).unwrap();
        let parsed = parse_trace_file(first.as_slice()).unwrap();
        prop_assert_eq!(&parsed.transactions, &txs);
        for tx in &parsed.transactions {
            prop_assert!(tx.events.iter().map(|e| e.index).eq(0..tx.events.len() as u32));
            for e in &tx.events {
                prop_assert!(e.validate().is_ok());
            }
        }
        let mut second = Vec::new();
        write_trace_file(&mut second, &parsed.transactions).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn moving_non_swap_events_keeps_the_path(seed in any::<u64>()) {
        let (txs, _) = generate_traces(seed, 30);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for tx in &txs {
            let (swaps, mut others): (Vec<TraceEvent>, Vec<TraceEvent>) =
                tx.events.iter().cloned().partition(|e| matches!(e.body, EventBody::Swap(_)));
            others.shuffle(&mut rng);
            let mut slots: Vec<bool> = (0..tx.events.len()).map(|i| i < swaps.len()).collect();
            slots.shuffle(&mut rng);
            let (mut s, mut o) = (swaps.into_iter(), others.into_iter());
            let events = slots
                .into_iter()
                .enumerate()
                .map(|(i, is_swap)| TraceEvent { index: i as u32, body: if is_swap { s.next() } else { o.next() }.unwrap().body })
                .collect();
            let moved = Transaction { events, ..tx.clone() };
            let (a, b) = (extract_arbitrage_cycle(tx), extract_arbitrage_cycle(&moved));
            prop_assert_eq!(a.map(|c| c.path), b.map(|c| c.path));
        }
    }

    #[test]
    fn profit_identity(seed in any::<u64>()) {
        let (txs, _) = generate_traces(seed, 40);
        let cfg = RunConfig::default();
        for tx in &txs {
            if let Some(c) = extract_arbitrage_cycle(tx) {
                let b = attribute_profit(tx, &c, &cfg.share_set(), &cfg.prices()).unwrap();
                prop_assert_eq!(&b.net + BigInt::from(b.share.clone()) + BigInt::from(b.gas_in_base.clone()), b.gross);
            }
        }
    }

    #[test]
    fn flow_edges_grow_with_k(edges in proptest::collection::vec((0u64..8, 0u64..8), 1..40)) {
        let txs: Vec<Transaction> = edges
            .iter()
            .enumerate()
            .map(|(i, &(from, to))| {
                let ev = TraceEvent {
                    index: 0,
                    body: EventBody::Transfer(Transfer {
                        from: Some(Address::from_low_u64(from + 1)),
                        to: Address::from_low_u64(to + 1),
                        amount: BigUint::from(i as u64 + 1),
                        token: None,
                        pool_sink: false,
                    }),
                };
                Transaction::new(TxHash::from_low_u64(i as u64), i as u64, Address::from_low_u64(from + 1), vec![ev], 0u8.into(), 0u8.into()).unwrap()
            })
            .collect();
        let store = TxStore::new(txs.clone());
        let key = |k| -> BTreeSet<(TxHash, u32)> {
            trace_flows(&txs[0], &store, k, &HashMap::new()).edges.iter().map(|e| (e.tx_hash, e.event_index)).collect()
        };
        let mut prev = key(0);
        prop_assert!(prev.is_empty());
        for k in 1..6 {
            let next = key(k);
            prop_assert!(prev.is_subset(&next));
            prev = next;
        }
    }

    #[test]
    fn v2_swap_conserves(r0 in 1u128..1u128 << 100, r1 in 1u128 << 20..1u128 << 100, a in 1u128..1u128 << 90, fee in 0u32..100_000) {
        let (t0, t1) = (token("WBNB"), token("USDT"));
        let pool = PoolState::v2(Address::from_low_u64(1), t0.clone(), t1, fee, r0.into(), r1.into());
        if let Ok((out, next)) = swap_v2(&pool, &t0, &BigUint::from(a)) {
            let mevforge::amm::PoolKind::V2 { reserve0, reserve1 } = &next.kind else { unreachable!() };
            prop_assert_eq!(reserve1 + &out, BigUint::from(r1));
            prop_assert_eq!(reserve0.clone(), BigUint::from(r0) + a);
            prop_assert!(reserve0 * reserve1 >= BigUint::from(r0) * BigUint::from(r1));
        }
    }

    #[test]
    fn run_is_atomic_and_splits_exactly(amount in 1u128..10u128.pow(22), r in 0u32..=10_000, skew in 900u32..1100) {
        let e18 = BigUint::from(10u8).pow(18);
        let a = Address::from_low_u64;
        let (wbnb, usdt, usd1) = (token("WBNB"), token("USDT"), token("USD1"));
        let mut pools = PoolSet::new([
            PoolState::v2(a(1), wbnb.clone(), usdt.clone(), 2500, &e18 * 1000u32, &e18 * (skew * 1000)),
            PoolState::v2(a(2), usdt, usd1.clone(), 100, &e18 * 5_000_000u32, &e18 * 5_000_000u32),
            PoolState::v2(a(3), wbnb.clone(), usd1, 2500, &e18 * 2000u32, &e18 * 2_000_000u32),
        ]);
        let d = pools.descriptor(&wbnb, &[a(1), a(2), a(3)]).unwrap();
        let before = pools.clone();
        match arbitrage_run(&d, &mut pools, &RunParams::new(BigUint::from(amount), r)) {
            Ok(RunOutcome::Executed(x)) => {
                prop_assert_eq!(&x.kept + &x.payout, x.delta.clone());
                prop_assert_eq!(x.payout, &x.delta * r / 10_000u32);
            }
            _ => prop_assert_eq!(pools, before),
        }
    }

    #[test]
    fn shares_sum_to_one(counts in proptest::collection::btree_map("[a-z]{1,6}", 0u64..1_000_000, 1..12)) {
        match market_share(&counts) {
            Ok(t) => prop_assert_eq!(t.rows.iter().map(|r| r.share.clone()).sum::<BigRational>(), BigRational::one()),
            Err(_) => prop_assert!(counts.values().all(|&c| c == 0)),
        }
    }

    #[test]
    fn mann_kendall_symmetries(xs in proptest::collection::vec(-20i64..20, 3..60)) {
        let series: Vec<BigRational> = xs.iter().map(|&x| rat(x)).collect();
        let neg: Vec<BigRational> = series.iter().map(|x| -x).collect();
        let rev: Vec<BigRational> = series.iter().rev().cloned().collect();
        let (a, n, r) = (mann_kendall(&series, 0.05).unwrap(), mann_kendall(&neg, 0.05).unwrap(), mann_kendall(&rev, 0.05).unwrap());
        prop_assert_eq!(n.s_statistic, -a.s_statistic);
        prop_assert_eq!(n.z_score, -a.z_score);
        prop_assert_eq!(r.s_statistic, -a.s_statistic);
    }

    #[test]
    fn matrix_total_is_exact(cells in proptest::collection::vec((0usize..4, 0usize..3, -1_000_000i64..1_000_000, 1i64..1000), 0..50)) {
        let entries: Vec<ProfitEntry> = cells
            .iter()
            .map(|&(b, t, n, d)| ProfitEntry::new(["a", "b", "c", "d"][b], ["WBNB", "USDT", "USDC"][t], BigRational::new(n.into(), d.into()), BigRational::zero()))
            .collect();
        let want: BigRational = entries.iter().map(|e| e.net_usd.clone()).sum();
        prop_assert_eq!(profit_matrix(&entries).grand_total(), want);
    }

    #[test]
    fn ecdf_rises_to_one(hops in proptest::collection::vec(1usize..12, 1..200)) {
        let pc = path_complexity(hops.iter().copied());
        prop_assert!(pc.ecdf.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].0 < w[1].0));
        prop_assert_eq!(pc.ecdf.last().unwrap().1.clone(), BigRational::one());
        prop_assert_eq!(pc.histogram.values().sum::<u64>(), hops.len() as u64);
    }

    #[test]
    fn risk_bits_commute(f in any::<bool>(), c in any::<bool>(), e in any::<bool>()) {
        let s = |a, b, x| risk_score(token("USDT"), a, b, x).score;
        let base = s(f, c, e);
        for p in [s(f, e, c), s(c, f, e), s(c, e, f), s(e, f, c), s(e, c, f)] {
            prop_assert_eq!(&p, &base);
        }
    }

    #[test]
    fn pearson_affine(points in proptest::collection::vec((-1000i64..1000, -1000i64..1000), 3..60), a in 1i64..50, b in -100i64..100) {
        let pts: Vec<(BigRational, BigRational)> = points.iter().map(|&(x, y)| (rat(x), rat(y))).collect();
        let Ok(r) = pathlen_profit_correlation(&pts) else { return Ok(()) };
        let scaled: Vec<_> = pts.iter().map(|(x, y)| (x * rat(a) + rat(b), y.clone())).collect();
        let flipped: Vec<_> = pts.iter().map(|(x, y)| (x.clone(), y * rat(-a) + rat(b))).collect();
        prop_assert!((pathlen_profit_correlation(&scaled).unwrap() - r).abs() < 1e-12);
        prop_assert!((pathlen_profit_correlation(&flipped).unwrap() + r).abs() < 1e-12);
    }

    #[test]
    fn opportunity_decays_and_crosses_floor(
        peak in 2u128..1u128 << 100,
        knee in 0i64..500,
        span in 1i64..500,
        exp in any::<bool>(),
    ) {
        let m = OpportunityModel {
            peak_value: peak,
            gas_floor: (peak / 2).max(1),
            epsilon: 0,
            knee_ms: ms(knee),
            deadline_ms: ms(knee + span),
            decay: if exp { Decay::Exponential } else { Decay::Piecewise },
            ..OpportunityModel::default()
        };
        let mut prev = u128::MAX;
        for t in (0..=2 * (knee + span)).step_by(3) {
            let v = m.value(ms(t));
            prop_assert!(v <= prev);
            prev = v;
        }
        prop_assert!(m.value(m.birth_ms + m.deadline_ms) < m.gas_floor);
    }
}

fn timing() -> Timing {
    Timing { horizon_ms: ms(3000), base_compute_ms: ms(10), birth_jitter_ms: 20 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn winners_stay_solvent(seed in any::<u64>(), la in 1i64..60, lb in 1i64..60, share in 0u32..=10_000) {
        let builders = vec![
            BuilderAgent::new("a", ms(la)).with_share(share),
            BuilderAgent::new("b", ms(lb)).with_tier(ms(2)).with_share(share),
        ];
        let (o, t) = (OpportunityModel::default(), timing());
        let mut bl = Blacklist::default();
        for h in 0..50 {
            let env = SlotEnv { height: h, builders: &builders, opportunity: &o, timing: &t, seed };
            for out in [run_slot_bsc(&env, &ProposerConfig::default(), &mut bl).unwrap(), run_slot_eth(&env, &RelayConfig::default()).unwrap()] {
                if out.winner.is_some() {
                    prop_assert!(out.realized_builder_profit >= 0);
                }
            }
        }
    }

    #[test]
    fn lower_latency_never_loses_wins(seed in any::<u64>(), lat in 2i64..100, cut in 1i64..100) {
        let mut s = Scenario::builtin("bsc_duopoly").unwrap();
        s.builders[1].latency_ms = ms(lat);
        let wins = |s: &Scenario| run_campaign(s, 200, seed).unwrap().summary.rows.iter().find(|r| r.builder_id == "beta").unwrap().wins;
        let before = wins(&s);
        s.builders[1].latency_ms = ms((lat - cut).max(0));
        prop_assert!(wins(&s) >= before);
    }

    #[test]
    fn no_fallback_without_non_delivery(seed in any::<u64>(), lats in proptest::collection::vec(0i64..40, 1..4)) {
        let builders: Vec<BuilderAgent> = lats.iter().enumerate().map(|(i, &l)| BuilderAgent::new(format!("b{i}"), ms(l))).collect();
        let (o, t) = (OpportunityModel::default(), timing());
        let mut bl = Blacklist::default();
        for h in 0..100 {
            let env = SlotEnv { height: h, builders: &builders, opportunity: &o, timing: &t, seed };
            prop_assert!(!run_slot_bsc(&env, &ProposerConfig::default(), &mut bl).unwrap().fallback_used);
        }
    }

    #[test]
    fn relay_winner_ignores_latency(seed in any::<u64>(), lats in proptest::collection::vec(0i64..400, 2..5), tiers in proptest::collection::vec(1i64..6, 5)) {
        let builders: Vec<BuilderAgent> = lats
            .iter()
            .zip(&tiers)
            .enumerate()
            .map(|(i, (&l, &t))| BuilderAgent::new(format!("b{i}"), ms(l)).with_tier(ms(t)).with_share(2500))
            .collect();
        let best = builders
            .iter()
            .map(|b| (b.payment(b.realized(OpportunityModel::default().peak_value)), std::cmp::Reverse(b.id.clone())))
            .max()
            .unwrap();
        let o = OpportunityModel::default();
        let t = Timing { horizon_ms: ms(12_000), ..timing() };
        let env = SlotEnv { height: 1, builders: &builders, opportunity: &o, timing: &t, seed };
        let out = run_slot_eth(&env, &RelayConfig::default()).unwrap();
        prop_assert_eq!(out.proposer_payment, best.0);
    }
}

#[test]
fn campaign_is_reproducible() {
    let s = Scenario::builtin("bsc_duopoly").unwrap();
    let a = run_campaign(&s, 300, 5).unwrap();
    let b = run_campaign(&s, 300, 5).unwrap();
    assert_eq!(a.outcomes, b.outcomes);
    let c = run_campaign(&s, 300, 6).unwrap();
    let heights: BTreeMap<u64, bool> = c.outcomes.iter().map(|o| (o.height, o.fallback_used)).collect();
    assert_eq!(heights.len(), 300);
}
