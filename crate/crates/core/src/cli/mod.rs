//! Configuration, record files and the commands behind the `mevforge` binary.

mod analyze;
mod args;
mod config;
mod extract;
pub mod generate;
mod records;
mod simulate;

pub use analyze::{cmd_analyze, read_block_counts, AnalyzeOptions, AnalyzeReport, REPORT_FILES};
pub use args::{main_with_args, run, Cli, Command};
pub use config::{RunConfig, WBNB_USD};
pub use extract::{cmd_extract, extract_stream, extract_transactions, read_categories, ExtractOptions, ExtractReport};
pub use generate::{cmd_gen_fixtures, FixtureKind};
pub use records::{read_records, ArbitrageRecord, RecordWriter, RECORDS_SCHEMA, RECORD_COLUMNS, UNKNOWN_BRAND};
pub use simulate::cmd_simulate;

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::amm::AmmError;
use crate::model::ModelError;
use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("write failed: {0}")]
    Write(io::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("records line {row}: {message}")]
    Schema { row: usize, message: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error("labels: {0}")]
    Labels(#[from] ModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Amm(#[from] AmmError),
    #[error("usage: {0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub(crate) fn csv(e: csv::Error) -> Self {
        CliError::Csv(e.to_string())
    }
}

pub(crate) fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub(crate) fn create_file(path: &Path) -> Result<io::BufWriter<std::fs::File>, CliError> {
    std::fs::File::create(path).map(io::BufWriter::new).map_err(|e| CliError::io(path, e))
}

pub(crate) fn open_file(path: &Path) -> Result<io::BufReader<std::fs::File>, CliError> {
    std::fs::File::open(path).map(io::BufReader::new).map_err(|e| CliError::io(path, e))
}
