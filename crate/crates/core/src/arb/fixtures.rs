//! Reference tokens and the worked 48Club trace used across tests, docs and the CLI.

use num_bigint::BigUint;

use crate::model::{Address, EventBody, InternalTxn, Swap, TokenId, TraceEvent, Transaction, Transfer, TxHash};

/// BSC mainnet token contracts. Every listed token uses 18 decimals on BSC.
const KNOWN_TOKENS: &[(&str, &str)] = &[
    ("WBNB", "0xbb4cdb9cbd36b01bd1cbaebf2de08d9173bc095c"),
    ("USDT", "0x55d398326f99059ff775485246999027b3197955"),
    ("USDC", "0x8ac76a51cc950d9822d68b83fe1ad97b32cd580d"),
    ("USD1", "0x8d0d000ee44948fc98c9b98a4fa4921476f08b0d"),
    ("BTCB", "0x7130d2a12b9bcbfae4f2634d864a1ee1ce3ead9c"),
    ("ETH", "0x2170ed0880ac9a755fd29b2688956bd959f933f8"),
    ("CAKE", "0x0e09fabb73bd3ade0a17ecc321fd13a19e81ce82"),
];

/// Token by symbol. Unknown symbols get a stable synthetic address derived from the symbol.
pub fn token(symbol: &str) -> TokenId {
    let address = KNOWN_TOKENS
        .iter()
        .find(|(s, _)| *s == symbol)
        .map(|(_, a)| a.parse().expect("static address"))
        .unwrap_or_else(|| {
            let mut b = [0u8; 20];
            b[0] = 0x70;
            for (i, c) in symbol.bytes().take(19).enumerate() {
                b[i + 1] = c;
            }
            Address(b)
        });
    TokenId::new(symbol, address, 18).expect("18 decimals")
}

pub const WORKED_BUILDER: &str = "0x487e5dfe70119c1b320b8219b190a6fa95a5bb48";

fn addr(s: &str) -> Address {
    s.parse().expect("static address")
}

fn amount(v: u128) -> BigUint {
    BigUint::from(v)
}

/// The three-hop USDT → WBNB → USD1 → USDT arbitrage with an 820-unit validator share.
///
/// Stablecoin legs are expressed in the same "units" the worked example reports, and the
/// 2.98 WBNB intermediate amount in 18-decimal base units.
pub fn worked_trace() -> Transaction {
    let (usdt, wbnb, usd1) = (token("USDT"), token("WBNB"), token("USD1"));
    let swap = |index, pool: &str, token_in: &TokenId, token_out: &TokenId, a_in: u128, a_out: u128| TraceEvent {
        index,
        body: EventBody::Swap(Swap {
            pool: addr(pool),
            token_in: token_in.clone(),
            token_out: token_out.clone(),
            amount_in: amount(a_in),
            amount_out: amount(a_out),
            to: None,
            pool_sink: false,
            routed: None,
        }),
    };
    let wbnb_mid = 2_980_000_000_000_000_000u128;
    let events = vec![
        swap(0, "0xa100000000000000000000000000000000000001", &usdt, &wbnb, 1_000_000, wbnb_mid),
        swap(1, "0xb400000000000000000000000000000000000002", &wbnb, &usd1, wbnb_mid, 1_001_120),
        swap(2, "0xc700000000000000000000000000000000000003", &usd1, &usdt, 1_001_120, 1_003_040),
        TraceEvent {
            index: 3,
            body: EventBody::Transfer(Transfer {
                from: None,
                to: Address::VALIDATOR_INCOME,
                amount: amount(820),
                token: Some(usdt.clone()),
                pool_sink: false,
            }),
        },
        TraceEvent {
            index: 4,
            body: EventBody::InternalTxn(InternalTxn {
                from: None,
                to: addr("0x00000000000000000000000000000000b011de75"),
                amount: amount(1_920),
            }),
        },
    ];
    let mut hash = [0u8; 32];
    hash[0] = 0xa2;
    hash[31] = 0x01;
    Transaction::new(TxHash(hash), 64_000_000, addr(WORKED_BUILDER), events, amount(180_000), amount(0))
        .expect("fixture is well formed")
        .with_timestamp(1_764_115_200)
}
