//! Per-EDU feature rows, their Realistic/Full projections and corpus marking
//! statistics.

mod dataset;
mod marking;
mod rows;

pub use dataset::{DataRow, Dataset, FeatureColumn, FeatureKind, FeatureMode, FeatureValue};
pub use marking::{marking_stats, marking_stats_for, MarkingCounts, MarkingStats};
pub use rows::{build_rows, oov_rate, FeatureRow};
