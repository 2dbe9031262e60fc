use std::collections::HashMap;
use std::io::Read;

use super::{Address, ModelError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BuilderLabel {
    pub brand: String,
    pub instance_name: String,
    pub address: Address,
}

/// Builder identities keyed by contract address.
#[derive(Debug, Clone, Default)]
pub struct LabelSet {
    by_address: HashMap<Address, BuilderLabel>,
    order: Vec<Address>,
}

impl LabelSet {
    pub fn new(labels: impl IntoIterator<Item = BuilderLabel>) -> Result<Self, ModelError> {
        let mut set = LabelSet::default();
        for label in labels {
            if let Some(existing) = set.by_address.get(&label.address) {
                return Err(ModelError::DuplicateLabel {
                    address: label.address,
                    first: existing.brand.clone(),
                    second: label.brand,
                });
            }
            set.order.push(label.address);
            set.by_address.insert(label.address, label);
        }
        Ok(set)
    }

    /// Reads `brand,instance,address` rows. A header row and `#` comments are allowed.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, ModelError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(reader);
        let mut labels = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let line = i + 1;
            let row = row.map_err(|e| ModelError::LabelFile { line, message: e.to_string() })?;
            if row.len() != 3 {
                return Err(ModelError::LabelFile { line, message: format!("expected 3 columns, got {}", row.len()) });
            }
            if i == 0 && row[2].eq_ignore_ascii_case("address") {
                continue;
            }
            let address = row[2]
                .parse()
                .map_err(|e: ModelError| ModelError::LabelFile { line, message: e.to_string() })?;
            labels.push(BuilderLabel { brand: row[0].to_string(), instance_name: row[1].to_string(), address });
        }
        LabelSet::new(labels)
    }

    pub fn label_builder(&self, address: &Address) -> Option<&BuilderLabel> {
        self.by_address.get(address)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BuilderLabel> {
        self.order.iter().map(|a| &self.by_address[a])
    }
}

/// The whitelisted BSC builder set (brand, instance, address) as of late 2025.
pub const BSC_BUILDERS_CSV: &str = include_str!("../../data/bsc_builders.csv");

pub fn bsc_builders() -> LabelSet {
    LabelSet::from_csv(BSC_BUILDERS_CSV.as_bytes()).expect("bundled builder list is valid")
}
