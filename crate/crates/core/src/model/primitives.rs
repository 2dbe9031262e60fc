use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ModelError;

fn decode_fixed<const N: usize>(s: &str) -> Result<[u8; N], ModelError> {
    let hex_part = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .ok_or_else(|| ModelError::InvalidHex(s.to_string()))?;
    if hex_part.len() != N * 2 {
        return Err(ModelError::InvalidLength { value: s.to_string(), expected: N });
    }
    let mut out = [0u8; N];
    hex::decode_to_slice(hex_part, &mut out).map_err(|_| ModelError::InvalidHex(s.to_string()))?;
    Ok(out)
}

/// A 20-byte account or contract address, rendered as lowercase `0x` hex.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Address(pub [u8; 20]);

impl Address {
    pub const ZERO: Address = Address([0u8; 20]);

    /// The `0xffff…fffe` endpoint that carries validator-side revenue in observed traces.
    pub const VALIDATOR_INCOME: Address = {
        let mut b = [0xffu8; 20];
        b[19] = 0xfe;
        Address(b)
    };

    pub fn from_low_u64(v: u64) -> Self {
        let mut b = [0u8; 20];
        b[12..].copy_from_slice(&v.to_be_bytes());
        Address(b)
    }

    pub fn as_bytes(&self) -> &[u8; 20] {
        &self.0
    }
}

impl FromStr for Address {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        decode_fixed::<20>(s.trim()).map(Address)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A 32-byte transaction hash or digest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TxHash(pub [u8; 32]);

impl TxHash {
    pub fn from_low_u64(v: u64) -> Self {
        let mut b = [0u8; 32];
        b[24..].copy_from_slice(&v.to_be_bytes());
        TxHash(b)
    }
}

impl FromStr for TxHash {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        decode_fixed::<32>(s.trim()).map(TxHash)
    }
}

impl fmt::Display for TxHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Debug for TxHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for TxHash {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TxHash {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub const MAX_DECIMALS: u8 = 36;

/// Token metadata. Equality and hashing cover all three fields.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawToken")]
pub struct TokenId {
    pub symbol: String,
    pub address: Address,
    pub decimals: u8,
}

#[derive(Deserialize)]
struct RawToken {
    symbol: String,
    address: Address,
    decimals: u8,
}

impl TryFrom<RawToken> for TokenId {
    type Error = ModelError;

    fn try_from(raw: RawToken) -> Result<Self, Self::Error> {
        TokenId::new(raw.symbol, raw.address, raw.decimals)
    }
}

impl TokenId {
    pub fn new(symbol: impl Into<String>, address: Address, decimals: u8) -> Result<Self, ModelError> {
        if decimals > MAX_DECIMALS {
            return Err(ModelError::Decimals(decimals));
        }
        Ok(TokenId { symbol: symbol.into(), address, decimals })
    }
}

impl fmt::Debug for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.symbol, self.address)
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn address_parses_and_renders_lowercase() {
        let a: Address = "0x487E5DFE70119C1B320B8219B190A6FA95A5BB48".parse().unwrap();
        assert_eq!(a.to_string(), "0x487e5dfe70119c1b320b8219b190a6fa95a5bb48");
    }

    #[test]
    fn address_rejects_wrong_length_and_prefix() {
        assert!("0x1234".parse::<Address>().is_err());
        assert!("487e5dfe70119c1b320b8219b190a6fa95a5bb48".parse::<Address>().is_err());
        assert!("0xzz7e5dfe70119c1b320b8219b190a6fa95a5bb48".parse::<Address>().is_err());
    }

    #[test]
    fn validator_income_address() {
        assert_eq!(
            Address::VALIDATOR_INCOME.to_string(),
            "0xfffffffffffffffffffffffffffffffffffffffe"
        );
    }

    #[test]
    fn decimals_bounded() {
        assert!(TokenId::new("X", Address::ZERO, 36).is_ok());
        assert!(matches!(TokenId::new("X", Address::ZERO, 37), Err(ModelError::Decimals(37))));
        let bad = r#"{"symbol":"X","address":"0x0000000000000000000000000000000000000000","decimals":40}"#;
        assert!(serde_json::from_str::<TokenId>(bad).is_err());
    }
}
