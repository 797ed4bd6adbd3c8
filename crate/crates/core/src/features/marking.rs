use std::collections::{BTreeMap, BTreeSet};

use crate::discourse::{DepGraph, DmAnnotation};
use crate::ingest::Corpus;

/// Explicit/implicit and distractor counts for one stratum.
///
/// Every EDU contributes one relation instance (its incoming relation, `ROOT`
/// for the root EDU), so `instances == edus`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MarkingCounts {
    pub instances: usize,
    /// Instances linked by at least one signal.
    pub explicit: usize,
    pub implicit: usize,
    /// EDUs containing a distractor.
    pub distractor_edus: usize,
    /// Instances with a distractor in their dependent or head EDU.
    pub distractor_instances: usize,
}

fn pct(x: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        100.0 * x as f64 / n as f64
    }
}

impl MarkingCounts {
    pub fn explicit_pct(&self) -> f64 {
        pct(self.explicit, self.instances)
    }

    pub fn implicit_pct(&self) -> f64 {
        pct(self.implicit, self.instances)
    }

    /// Distractor-bearing EDUs over EDUs.
    pub fn distractor_edu_pct(&self) -> f64 {
        pct(self.distractor_edus, self.instances)
    }

    /// Distractor-affected relation instances over instances.
    pub fn distractor_instance_pct(&self) -> f64 {
        pct(self.distractor_instances, self.instances)
    }

    fn add(&mut self, explicit: bool, distractor_edu: bool, distractor_instance: bool) {
        self.instances += 1;
        if explicit {
            self.explicit += 1;
        } else {
            self.implicit += 1;
        }
        self.distractor_edus += usize::from(distractor_edu);
        self.distractor_instances += usize::from(distractor_instance);
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MarkingStats {
    pub total: MarkingCounts,
    pub by_class: BTreeMap<String, MarkingCounts>,
    pub by_genre: BTreeMap<String, MarkingCounts>,
}

pub fn marking_stats(corpus: &Corpus) -> MarkingStats {
    marking_stats_for(
        corpus.documents.iter().map(|d| (&d.gold_deps, d.genre())),
        &corpus.dm_annotations,
    )
}

/// Marking statistics over gold graphs with their genres.
pub fn marking_stats_for<'a>(docs: impl IntoIterator<Item = (&'a DepGraph, &'a str)>, dms: &[DmAnnotation]) -> MarkingStats {
    let mut signalled: BTreeSet<(&str, usize, usize)> = BTreeSet::new();
    let mut distractors: BTreeSet<(&str, usize)> = BTreeSet::new();
    for dm in dms {
        match &dm.link {
            Some(l) => {
                signalled.insert((dm.doc_id.as_str(), l.source_edu, l.target_edu));
            }
            None => {
                distractors.insert((dm.doc_id.as_str(), dm.edu));
            }
        }
    }
    let mut stats = MarkingStats::default();
    for (deps, genre) in docs {
        let doc = deps.doc_id();
        for node in deps.nodes() {
            let explicit = signalled.contains(&(doc, node.edu_id, node.head));
            let in_edu = distractors.contains(&(doc, node.edu_id));
            let in_instance = in_edu || (node.head != 0 && distractors.contains(&(doc, node.head)));
            stats.total.add(explicit, in_edu, in_instance);
            stats
                .by_class
                .entry(node.class.clone())
                .or_default()
                .add(explicit, in_edu, in_instance);
            stats
                .by_genre
                .entry(genre.to_string())
                .or_default()
                .add(explicit, in_edu, in_instance);
        }
    }
    stats
}
