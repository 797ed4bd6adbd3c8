//! Configuration, output bookkeeping and pipeline stages behind the
//! `rstdiag` binary.

pub mod config;
pub mod output;
pub mod pipeline;
