//! Significance tests, beta regression on scaled error counts and the
//! distractor consistency analysis.

mod betareg;
mod consistency;
mod design;
mod hypothesis;
mod logit;
mod special;
mod table;

pub use betareg::{beta_fit, lrt, squeeze, BetaOptions, BetaRegFit, Response};
pub use consistency::{
    consistency_cases, distractor_consistency, majority_class, ConsistencyCase, ConsistencyReport, DmClassMap, Verdict,
};
pub use design::{Design, TermCoding};
pub use hypothesis::{chi_square_phi, welch_t, TestResult};
pub use logit::LogisticModel;
pub use special::trigamma;
pub use table::{stars, term_p_values, PMethod, PValueGrid, TermPValue};
