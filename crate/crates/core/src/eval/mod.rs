//! Parseval scoring, multi-run error profiles and annotator agreement.

mod agreement;
mod errors;
mod parseval;

pub use agreement::{mutual_f1, MutualF1};
pub use errors::{error_profiles, ErrorProfile, ErrorTarget};
pub use parseval::{parseval, LabelLevel, ParsevalCounts, ParsevalScore};
