//! Market share, profit aggregation, path statistics, trend tests and token risk scores.
//! Everything is exact rational arithmetic until a report is rendered.

mod complexity;
mod profit;
pub mod report;
mod risk;
mod share;
mod trend;

pub use complexity::{path_complexity, pathlen_profit_correlation, PathComplexity};
pub use profit::{profit_matrix, profit_to_fee_ratio, proposer_split, ProfitEntry, ProfitMatrix, ProposerSplit};
pub use risk::{default_risk_table, risk_score, RiskScore};
pub use share::{market_share, ShareRow, ShareTable};
pub use trend::{daily_series, mann_kendall, mann_kendall_s, TrendDirection, TrendResult, DEFAULT_ALPHA};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyticsError {
    #[error("every block count is zero")]
    EmptyMarket,
    #[error("trend test needs at least 3 points, got {0}")]
    InsufficientData(usize),
    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(&'static str),
    #[error("alpha must lie in (0, 1)")]
    Alpha,
}
