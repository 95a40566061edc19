//! Projection-based mining of high-utility sequential patterns from
//! quantitative sequence databases.
//!
//! A q-sequence database pairs item quantities with a per-item profit table.
//! A sequential pattern is high-utility when the sum of its best-match
//! utilities across the database reaches a caller-chosen fraction of the
//! total database utility. The miner indexes each sequence once into a
//! utility-array ([`uarray`]), then grows patterns by itemset extension
//! (I-concatenation) and sequence extension (S-concatenation), carrying
//! compact pivot projections instead of rewritten databases and pruning with
//! the SWU and SEU upper bounds.
//!
//! Module map:
//! - [`model`]: items, q-sequences, profit tables, patterns, thresholds
//! - [`matcher`]: reference match enumeration and utility/bound definitions
//! - [`uarray`]: utility-array index and pivot projections
//! - [`miner`]: the search itself, pruning strategies, statistics, verify
//! - [`oracle`]: brute-force enumeration used for testing and `verify`
//! - [`io`]: text formats, result serialization, synthetic data generator

pub mod io;
pub mod matcher;
pub mod miner;
pub mod model;
pub mod oracle;
pub mod uarray;

pub use miner::{mine, MineError, MinerConfig, MiningResult, MiningStats};
pub use model::{
    Item, ModelError, Pattern, ProfitTable, QElement, QItem, QSequence, QSequenceDatabase,
    Threshold, Utility,
};
pub use oracle::{OracleError, OracleLimits};
