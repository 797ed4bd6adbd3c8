/// Whether a discourse marker signals a gold relation or distracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DmStatus {
    Signal,
    Distractor,
}

/// A gold relation instance, oriented dependent → head.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationLink {
    pub source_edu: usize,
    pub target_edu: usize,
    pub relation: String,
}

/// A token-anchored discourse marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmAnnotation {
    pub doc_id: String,
    /// Sorted, possibly discontinuous token positions.
    pub token_indices: Vec<usize>,
    pub dm_form: String,
    pub status: DmStatus,
    /// Present iff `status` is `Signal`.
    pub link: Option<RelationLink>,
    /// EDU containing the marker's tokens.
    pub edu: usize,
}

impl DmAnnotation {
    pub fn is_signal(&self) -> bool {
        self.status == DmStatus::Signal
    }

    pub fn is_distractor(&self) -> bool {
        self.status == DmStatus::Distractor
    }

    /// Lowercased form with collapsed whitespace, used for class lookups.
    pub fn normalized_form(&self) -> String {
        self.dm_form
            .split_whitespace()
            .map(str::to_lowercase)
            .collect::<Vec<_>>()
            .join(" ")
    }
}
