//! Gradient-boosted trees for predicting hard EDUs, with gain importances.

mod cv;
mod model;
mod schema;
mod text;
mod tree;

pub use cv::{cross_validate, document_folds, CvReport, CV_PROTOCOL};
pub use model::{
    fit, importance_report, parent_gains, rank_gains, write_importance_csv, GbtModel, GbtParams, Importance, Prediction,
};
pub use schema::{Encoded, FeatureSchema, UNSEEN};
pub use text::{read_model, write_model};
pub use tree::{Node, Tree};
