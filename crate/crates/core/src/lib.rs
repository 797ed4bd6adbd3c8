//! Tools for studying where RST discourse parsers fail.
//!
//! The crate reads RST treebanks (`rs3`, `dis`) and dependency exports
//! (`rsd`), converts constituent trees to discourse dependencies, scores
//! parses with original Parseval, aggregates per-EDU errors over several
//! parser runs, and fits the statistical and gradient-boosted models used to
//! explain and predict those errors.

pub mod analysis;
pub mod boost;
pub mod discourse;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod synth;
pub mod treeops;
mod error;

pub use error::{Error, Result};
