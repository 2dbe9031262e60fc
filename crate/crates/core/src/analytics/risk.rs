use num_rational::BigRational;

use crate::model::TokenId;

/// Centralisation risk of a token: the mean of three binary features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskScore {
    pub token: TokenId,
    /// Issuer or bridge can freeze balances.
    pub freezable: bool,
    /// Backed by off-chain custody.
    pub custodial: bool,
    /// Depends on another chain's bridge.
    pub external_chain: bool,
    pub score: BigRational,
}

pub fn risk_score(token: TokenId, freezable: bool, custodial: bool, external_chain: bool) -> RiskScore {
    let bits = u8::from(freezable) + u8::from(custodial) + u8::from(external_chain);
    RiskScore { token, freezable, custodial, external_chain, score: BigRational::new(bits.into(), 3.into()) }
}

/// Feature bits for common BSC tokens as `(symbol, freezable, custodial, external_chain)`.
pub fn default_risk_table() -> &'static [(&'static str, bool, bool, bool)] {
    &[
        ("WBNB", false, false, false),
        ("CAKE", false, false, false),
        ("USDT", true, true, false),
        ("USDC", true, true, false),
        ("USD1", true, true, false),
        ("FDUSD", true, true, false),
        ("BTCB", false, true, true),
        ("ETH", false, true, true),
        ("DAI", false, false, true),
    ]
}
