use std::fmt;
use std::str::FromStr;

use crate::discourse::DepGraph;
use crate::error::{Error, Result};

/// Which error count decides whether an EDU is hard.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ErrorTarget {
    #[default]
    Attach,
    Label,
    /// A run counts if it makes either error.
    Either,
}

impl FromStr for ErrorTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "attach" => Ok(ErrorTarget::Attach),
            "label" => Ok(ErrorTarget::Label),
            "either" => Ok(ErrorTarget::Either),
            other => Err(Error::Config(format!("unknown error target `{other}`"))),
        }
    }
}

impl fmt::Display for ErrorTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorTarget::Attach => "attach",
            ErrorTarget::Label => "label",
            ErrorTarget::Either => "either",
        })
    }
}

/// Errors on one EDU over `k` parser runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProfile {
    pub edu_id: usize,
    pub attach_errors: usize,
    pub label_errors: usize,
    /// Runs with an attachment or a label error.
    pub either_errors: usize,
    pub k: usize,
    pub scaled_attach: f64,
    pub scaled_label: f64,
    pub is_hard: bool,
}

impl ErrorProfile {
    pub fn target_errors(&self, target: ErrorTarget) -> usize {
        match target {
            ErrorTarget::Attach => self.attach_errors,
            ErrorTarget::Label => self.label_errors,
            ErrorTarget::Either => self.either_errors,
        }
    }
}

/// Count per-EDU errors of each predicted graph against the gold graph.
///
/// A run makes an attachment error when the predicted head differs from gold,
/// and a label error when the head differs or the relation class does.
pub fn error_profiles(
    gold: &DepGraph,
    preds: &[DepGraph],
    hard_threshold: usize,
    target: ErrorTarget,
) -> Result<Vec<ErrorProfile>> {
    if preds.is_empty() {
        return Err(Error::Config(format!("no predicted runs for {}", gold.doc_id())));
    }
    if let Some(p) = preds.iter().find(|p| p.len() != gold.len()) {
        return Err(Error::SegmentationMismatch {
            doc_id: gold.doc_id().to_string(),
            message: format!("gold has {} EDUs, a prediction {}", gold.len(), p.len()),
        });
    }
    let k = preds.len();
    let profiles = gold
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let (mut attach, mut label) = (0, 0);
            for pred in preds {
                let p = &pred.nodes()[i];
                let head_wrong = p.head != g.head;
                attach += usize::from(head_wrong);
                label += usize::from(head_wrong || p.class != g.class);
            }
            let mut profile = ErrorProfile {
                edu_id: g.edu_id,
                attach_errors: attach,
                label_errors: label,
                either_errors: label,
                k,
                scaled_attach: attach as f64 / k as f64,
                scaled_label: label as f64 / k as f64,
                is_hard: false,
            };
            profile.is_hard = profile.target_errors(target) >= hard_threshold;
            profile
        })
        .collect();
    Ok(profiles)
}
