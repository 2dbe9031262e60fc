use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use super::{format_ms, ms, BuilderAgent, EventQueue, Ms, OpportunityModel, ProposerConfig, RelayConfig, SimError, Timing};

/// Everything a single slot needs apart from protocol-specific configuration.
#[derive(Debug, Clone, Copy)]
pub struct SlotEnv<'a> {
    pub height: u64,
    pub builders: &'a [BuilderAgent],
    pub opportunity: &'a OpportunityModel,
    pub timing: &'a Timing,
    /// Campaign seed; the slot derives its own stream from it and `height`.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bid {
    pub builder_id: String,
    pub height: u64,
    #[serde(serialize_with = "ser_ms")]
    pub timestamp_ms: Ms,
    #[serde(serialize_with = "ser_hex")]
    pub tx_root: [u8; 32],
    #[serde(serialize_with = "ser_u128")]
    pub expected_gas_fee: u128,
    #[serde(serialize_with = "ser_u128")]
    pub offered_payment: u128,
    pub full_body_attached: bool,
    /// Surplus the builder realises if this bid wins; never below `offered_payment`.
    #[serde(serialize_with = "ser_u128")]
    pub delta: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReceivedBid {
    pub builder_id: String,
    #[serde(serialize_with = "ser_ms")]
    pub arrival_ms: Ms,
    #[serde(serialize_with = "ser_u128")]
    pub offered_payment: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlotOutcome {
    pub height: u64,
    pub winner: Option<String>,
    #[serde(serialize_with = "ser_u128")]
    pub proposer_payment: u128,
    pub fallback_used: bool,
    pub blacklist_events: Vec<String>,
    /// Bids the proposer considered. Under the relay this is each builder's standing bid.
    pub bids_received: Vec<ReceivedBid>,
    #[serde(serialize_with = "ser_i128")]
    pub realized_builder_profit: i128,
}

fn ser_ms<S: Serializer>(v: &Ms, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_ms(*v))
}

fn ser_hex<S: Serializer>(v: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("0x{}", hex::encode(v)))
}

fn ser_u128<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn ser_i128<S: Serializer>(v: &i128, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Per-proposer exclusion list: builder id → last height at which it is still excluded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Blacklist(BTreeMap<String, u64>);

impl Blacklist {
    pub fn is_blocked(&self, id: &str, height: u64) -> bool {
        self.0.get(id).is_some_and(|&until| height <= until)
    }

    /// Excludes `id` for the `slots` heights following `height`.
    pub fn add(&mut self, id: &str, height: u64, slots: u64) {
        self.0.insert(id.to_string(), height.saturating_add(slots));
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the random stream for one slot.
pub fn slot_seed(seed: u64, height: u64) -> u64 {
    splitmix(seed ^ splitmix(height))
}

struct Draws {
    jitter: Ms,
    fails: Vec<bool>,
}

/// Random draws for a slot, in a fixed order: birth jitter, then one non-delivery draw per
/// builder in id order. Every draw happens whether or not it ends up mattering.
fn draw(env: &SlotEnv, order: &[usize]) -> Draws {
    let mut rng = ChaCha8Rng::seed_from_u64(slot_seed(env.seed, env.height));
    let jitter = rng.random_range(0..=env.timing.birth_jitter_ms);
    let fails = order.iter().map(|&i| rng.random::<f64>() < env.builders[i].non_delivery_prob).collect();
    Draws { jitter: ms(i64::from(jitter)), fails }
}

fn validate(env: &SlotEnv) -> Result<Vec<usize>, SimError> {
    let mut bad = env.opportunity.validate("opportunity.");
    let mut ids = BTreeSet::new();
    for (i, b) in env.builders.iter().enumerate() {
        bad.extend(b.validate(&format!("builders[{i}].")));
        if !ids.insert(b.id.as_str()) {
            bad.push(format!("builders[{i}].id"));
        }
    }
    if env.timing.horizon_ms <= ms(0) {
        bad.push("horizon_ms".into());
    }
    if env.timing.base_compute_ms < ms(0) {
        bad.push("base_compute_ms".into());
    }
    if !bad.is_empty() {
        return Err(SimError::Config(bad));
    }
    let mut order: Vec<usize> = (0..env.builders.len()).collect();
    order.sort_by(|&a, &b| env.builders[a].id.cmp(&env.builders[b].id));
    Ok(order)
}

fn tx_root(id: &str, height: u64, t: Ms, payment: u128) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(id.as_bytes());
    h.update(height.to_be_bytes());
    h.update(t.numer().to_be_bytes());
    h.update(t.denom().to_be_bytes());
    h.update(payment.to_be_bytes());
    h.finalize().into()
}

fn make_bid(env: &SlotEnv, b: &BuilderAgent, t: Ms, value: u128, full_body: bool) -> Bid {
    let delta = b.realized(value);
    let payment = b.payment(delta);
    Bid {
        builder_id: b.id.clone(),
        height: env.height,
        timestamp_ms: t,
        tx_root: tx_root(&b.id, env.height, t, payment),
        expected_gas_fee: env.opportunity.gas_floor,
        offered_payment: payment,
        full_body_attached: full_body,
        delta,
    }
}

/// Highest payment first, then earliest arrival, then builder id.
fn rank(bids: &mut [Bid]) {
    bids.sort_by(|a, b| {
        b.offered_payment
            .cmp(&a.offered_payment)
            .then(a.timestamp_ms.cmp(&b.timestamp_ms))
            .then(a.builder_id.cmp(&b.builder_id))
    });
}

fn received(bids: &[Bid]) -> Vec<ReceivedBid> {
    let mut out: Vec<_> = bids
        .iter()
        .map(|b| ReceivedBid { builder_id: b.builder_id.clone(), arrival_ms: b.timestamp_ms, offered_payment: b.offered_payment })
        .collect();
    out.sort_by(|a, b| a.arrival_ms.cmp(&b.arrival_ms).then(a.builder_id.cmp(&b.builder_id)));
    out
}

fn outcome(height: u64, winner: Option<&Bid>, blacklist_events: Vec<String>, bids: &[Bid]) -> SlotOutcome {
    SlotOutcome {
        height,
        winner: winner.map(|w| w.builder_id.clone()),
        proposer_payment: winner.map_or(0, |w| w.offered_payment),
        fallback_used: winner.is_none(),
        blacklist_events,
        bids_received: received(bids),
        realized_builder_profit: winner.map_or(0, |w| (w.delta - w.offered_payment) as i128),
    }
}

enum BscEvent {
    Arrival(Bid),
    Cutoff,
}

/// Direct single-round selection.
///
/// Each builder sees the opportunity after one latency leg, computes, and its bid lands one
/// more leg later. The proposer listens until the later of the listen window and the first
/// arrival, picks the best bid received by then, and requests the body. A builder that fails
/// to deliver is blacklisted by this proposer and the next-best bid is tried. With no usable
/// bid the proposer builds a fallback block.
pub fn run_slot_bsc(env: &SlotEnv, proposer: &ProposerConfig, blacklist: &mut Blacklist) -> Result<SlotOutcome, SimError> {
    let order = validate(env)?;
    let draws = draw(env, &order);
    let mut opp = env.opportunity.clone();
    opp.birth_ms += draws.jitter;

    let mut queue = EventQueue::new();
    let mut fails = BTreeMap::new();
    for (k, &i) in order.iter().enumerate() {
        let b = &env.builders[i];
        fails.insert(b.id.clone(), draws.fails[k]);
        if blacklist.is_blocked(&b.id, env.height) {
            continue;
        }
        let arrival = opp.birth_ms + b.latency_ms * 2 + b.compute_ms(env.timing.base_compute_ms);
        if arrival > env.timing.horizon_ms || !opp.is_worth_bidding(arrival) {
            continue;
        }
        queue.push(arrival, BscEvent::Arrival(make_bid(env, b, arrival, opp.value(arrival), false)));
    }

    let mut arrived = Vec::new();
    let mut listening = false;
    while let Some((t, ev)) = queue.pop() {
        match ev {
            BscEvent::Arrival(bid) => {
                if !listening {
                    listening = true;
                    queue.push(t.max(proposer.listen_window_ms), BscEvent::Cutoff);
                }
                arrived.push(bid);
            }
            BscEvent::Cutoff => break,
        }
    }

    let mut ranked = arrived.clone();
    rank(&mut ranked);
    let mut events = Vec::new();
    let mut winner = None;
    for bid in &ranked {
        if fails[&bid.builder_id] {
            blacklist.add(&bid.builder_id, env.height, proposer.blacklist_slots);
            events.push(bid.builder_id.clone());
            continue;
        }
        winner = Some(bid);
        break;
    }
    Ok(outcome(env.height, winner, events, &arrived))
}

enum EthEvent {
    AtRelay(Bid),
    Rebid(usize),
}

/// Relay-mediated commit–reveal.
///
/// A builder's first bid carries the decayed value at its arrival time. With rebids enabled it
/// then resubmits every `rebid_interval_ms` until the horizon; since no block is sealed before
/// the horizon, rebids carry the opportunity's undecayed value. Each builder's latest bid stands
/// and the proposer signs the best header at the horizon. The relay holds the body, so there is
/// no non-delivery.
pub fn run_slot_eth(env: &SlotEnv, relay: &RelayConfig) -> Result<SlotOutcome, SimError> {
    let order = validate(env)?;
    let draws = draw(env, &order);
    let mut opp = env.opportunity.clone();
    opp.birth_ms += draws.jitter;
    let horizon = env.timing.horizon_ms;
    let interval_ok = relay.rebid_interval_ms > ms(0);

    let mut queue = EventQueue::new();
    for (k, &i) in order.iter().enumerate() {
        let b = &env.builders[i];
        let first = opp.birth_ms + b.latency_ms * 2 + b.compute_ms(env.timing.base_compute_ms);
        if first > horizon {
            continue;
        }
        if opp.is_worth_bidding(first) {
            queue.push(first + relay.delay_ms, EthEvent::AtRelay(make_bid(env, b, first, opp.value(first), true)));
        }
        if relay.rebids && interval_ok && first + relay.rebid_interval_ms <= horizon {
            queue.push(first + relay.rebid_interval_ms, EthEvent::Rebid(k));
        }
    }

    // Rebids carry the undecayed value, so each builder's rebid differs only in time and root.
    let rebid: Vec<Option<Bid>> = order
        .iter()
        .map(|&i| (opp.peak_value >= opp.gas_floor).then(|| make_bid(env, &env.builders[i], horizon, opp.peak_value, true)))
        .collect();
    let mut standing: BTreeMap<String, Bid> = BTreeMap::new();
    while let Some((t, ev)) = queue.pop() {
        match ev {
            EthEvent::AtRelay(bid) => {
                if t <= horizon {
                    let mut bid = bid;
                    bid.timestamp_ms = t;
                    standing.insert(bid.builder_id.clone(), bid);
                }
            }
            EthEvent::Rebid(k) => {
                if let Some(template) = &rebid[k] {
                    let mut bid = template.clone();
                    bid.timestamp_ms = t;
                    bid.tx_root = tx_root(&bid.builder_id, env.height, t, bid.offered_payment);
                    queue.push(t + relay.delay_ms, EthEvent::AtRelay(bid));
                }
                if t + relay.rebid_interval_ms <= horizon {
                    queue.push(t + relay.rebid_interval_ms, EthEvent::Rebid(k));
                }
            }
        }
    }
    let bids: Vec<Bid> = standing.into_values().collect();
    let mut ranked = bids.clone();
    rank(&mut ranked);
    Ok(outcome(env.height, ranked.first(), Vec::new(), &bids))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn timing(horizon: i64) -> Timing {
        Timing { horizon_ms: ms(horizon), base_compute_ms: ms(10), birth_jitter_ms: 20 }
    }

    fn env<'a>(h: u64, b: &'a [BuilderAgent], o: &'a OpportunityModel, t: &'a Timing) -> SlotEnv<'a> {
        SlotEnv { height: h, builders: b, opportunity: o, timing: t, seed: 42 }
    }

    fn duo(fast: i64, slow: i64) -> Vec<BuilderAgent> {
        vec![
            BuilderAgent::new("slow", ms(slow)).with_tier(ms(2)).with_share(5000),
            BuilderAgent::new("fast", ms(fast)).with_share(5000),
        ]
    }

    #[test]
    fn fast_builder_always_wins_direct() {
        let b = duo(10, 120);
        let (o, t) = (OpportunityModel::default(), timing(3000));
        let mut bl = Blacklist::default();
        for h in 0..1000 {
            let out = run_slot_bsc(&env(h, &b, &o, &t), &ProposerConfig::default(), &mut bl).unwrap();
            assert_eq!(out.winner.as_deref(), Some("fast"));
            assert!(out.bids_received.iter().all(|r| r.builder_id == "fast"));
        }
    }

    #[test]
    fn empty_market_falls_back() {
        let (o, t) = (OpportunityModel::default(), timing(3000));
        let out = run_slot_bsc(&env(0, &[], &o, &t), &ProposerConfig::default(), &mut Blacklist::default()).unwrap();
        assert!(out.fallback_used && out.winner.is_none());
        let out = run_slot_eth(&env(0, &[], &o, &t), &RelayConfig::default()).unwrap();
        assert!(out.fallback_used);
    }

    #[test]
    fn ties_break_by_id_and_repeat() {
        let b = vec![BuilderAgent::new("b", ms(10)).with_share(100), BuilderAgent::new("a", ms(10)).with_share(100)];
        let (o, t) = (OpportunityModel::default(), timing(3000));
        let e = env(7, &b, &o, &t);
        let first = run_slot_bsc(&e, &ProposerConfig::default(), &mut Blacklist::default()).unwrap();
        assert_eq!(first.winner.as_deref(), Some("a"));
        let again = run_slot_bsc(&e, &ProposerConfig::default(), &mut Blacklist::default()).unwrap();
        assert_eq!(first, again);
    }

    #[test]
    fn relay_lets_the_slow_high_value_builder_win() {
        let b = duo(10, 120);
        let (o, t) = (OpportunityModel::default(), timing(12000));
        let relay = RelayConfig { rebids: true, ..Default::default() };
        let out = run_slot_eth(&env(3, &b, &o, &t), &relay).unwrap();
        assert_eq!(out.winner.as_deref(), Some("slow"));
        assert!(out.proposer_payment as i128 <= out.proposer_payment as i128 + out.realized_builder_profit);
    }

    #[test]
    fn single_builder_relay_payment_is_its_bid() {
        let b = vec![BuilderAgent::new("solo", ms(30)).with_share(2000)];
        let (o, t) = (OpportunityModel::default(), timing(12000));
        let out = run_slot_eth(&env(0, &b, &o, &t), &RelayConfig::default()).unwrap();
        assert_eq!(out.winner.as_deref(), Some("solo"));
        assert_eq!(out.bids_received.len(), 1);
        assert_eq!(out.proposer_payment, out.bids_received[0].offered_payment);
    }

    #[test]
    fn failed_delivery_blacklists_and_falls_through() {
        let mut b = vec![BuilderAgent::new("slow", ms(30)).with_share(5000), BuilderAgent::new("fast", ms(10)).with_share(5000)];
        b[1].non_delivery_prob = 1.0;
        let (o, t) = (OpportunityModel::default(), timing(3000));
        let p = ProposerConfig { blacklist_slots: 3, listen_window_ms: ms(150), ..Default::default() };
        let mut bl = Blacklist::default();
        let out = run_slot_bsc(&env(10, &b, &o, &t), &p, &mut bl).unwrap();
        assert_eq!(out.blacklist_events, ["fast"]);
        assert_eq!(out.winner.as_deref(), Some("slow"));
        for h in 11..=13 {
            let out = run_slot_bsc(&env(h, &b, &o, &t), &p, &mut bl).unwrap();
            assert!(out.blacklist_events.is_empty());
            assert!(out.bids_received.iter().all(|r| r.builder_id == "slow"));
        }
        let out = run_slot_bsc(&env(14, &b, &o, &t), &p, &mut bl).unwrap();
        assert_eq!(out.blacklist_events, ["fast"]);
    }

    #[test]
    fn invalid_builders_are_config_errors() {
        let b = vec![BuilderAgent::new("x", ms(-5)), BuilderAgent::new("x", ms(1))];
        let (o, t) = (OpportunityModel::default(), timing(3000));
        match run_slot_bsc(&env(0, &b, &o, &t), &ProposerConfig::default(), &mut Blacklist::default()) {
            Err(SimError::Config(keys)) => assert_eq!(keys, ["builders[0].latency_ms", "builders[1].id"]),
            other => panic!("{other:?}"),
        }
    }
}
