//! Summaries, comparisons, the ground-truth oracle, file formats and
//! configuration.

pub mod config;
pub mod io;
pub mod oracle;
pub mod stats;

pub use config::Config;
pub use oracle::{run_oracle, OracleResult};
pub use stats::{compare, summarize, ComparisonReport, SummaryStats};
