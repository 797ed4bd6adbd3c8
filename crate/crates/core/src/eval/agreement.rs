use std::collections::{BTreeMap, BTreeSet};

use crate::discourse::DmAnnotation;

/// Agreement between two DM annotation sets, in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualF1 {
    pub dm_f1: f64,
    pub relation_f1: f64,
    /// Markers found by both annotators.
    pub matched: usize,
}

type MarkerKey = (String, Vec<usize>);
type LinkKey = Option<(usize, usize, String)>;

fn group(annotations: &[DmAnnotation]) -> BTreeMap<MarkerKey, BTreeSet<LinkKey>> {
    let mut out: BTreeMap<MarkerKey, BTreeSet<LinkKey>> = BTreeMap::new();
    for a in annotations {
        let link = a
            .link
            .as_ref()
            .map(|l| (l.source_edu, l.target_edu, l.relation.to_lowercase()));
        out.entry((a.doc_id.clone(), a.token_indices.clone()))
            .or_default()
            .insert(link);
    }
    out
}

fn f1(tp: usize, n_a: usize, n_b: usize) -> f64 {
    if n_a + n_b == 0 {
        return 0.0;
    }
    100.0 * 2.0 * tp as f64 / (n_a + n_b) as f64
}

/// Marker agreement on exact token sets, and relation agreement on the
/// markers both annotators found.
///
/// Rows sharing a token set are one marker with several links; a distractor
/// contributes a `NONE` link. F1 is symmetric, so the mean of the two
/// directional scores equals either one. Empty overlaps score 0.
pub fn mutual_f1(a: &[DmAnnotation], b: &[DmAnnotation]) -> MutualF1 {
    let ga = group(a);
    let gb = group(b);
    let mut matched = 0;
    let (mut link_tp, mut links_a, mut links_b) = (0, 0, 0);
    for (key, la) in &ga {
        if let Some(lb) = gb.get(key) {
            matched += 1;
            link_tp += la.intersection(lb).count();
            links_a += la.len();
            links_b += lb.len();
        }
    }
    MutualF1 {
        dm_f1: f1(matched, ga.len(), gb.len()),
        relation_f1: f1(link_tp, links_a, links_b),
        matched,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discourse::{DmStatus, RelationLink};

    fn dm(token: usize, form: &str, link: Option<(usize, usize, &str)>) -> DmAnnotation {
        DmAnnotation {
            doc_id: "d".into(),
            token_indices: vec![token],
            dm_form: form.into(),
            status: if link.is_some() { DmStatus::Signal } else { DmStatus::Distractor },
            link: link.map(|(s, t, r)| RelationLink {
                source_edu: s,
                target_edu: t,
                relation: r.into(),
            }),
            edu: 1,
        }
    }

    #[test]
    fn identical_sets() {
        let a = vec![dm(5, "but", Some((2, 1, "contrast"))), dm(9, "so", None)];
        let m = mutual_f1(&a, &a);
        assert_eq!((m.dm_f1, m.relation_f1), (100.0, 100.0));
    }

    #[test]
    fn one_extra_marker() {
        let a = vec![dm(5, "but", None)];
        let b = vec![dm(5, "but", None), dm(9, "so", None)];
        let m = mutual_f1(&a, &b);
        // precision 1/2 and recall 1/1 in one direction, mirrored in the other
        assert!((m.dm_f1 - 200.0 / 3.0).abs() < 1e-9);
        assert_eq!(m.relation_f1, 100.0);
        assert_eq!(mutual_f1(&b, &a).dm_f1, m.dm_f1);
    }

    #[test]
    fn disjoint_and_relation_disagreement() {
        let a = vec![dm(5, "but", None)];
        let b = vec![dm(6, "so", None)];
        let m = mutual_f1(&a, &b);
        assert_eq!((m.dm_f1, m.relation_f1, m.matched), (0.0, 0.0, 0));
        let c = vec![dm(5, "but", Some((2, 1, "contrast")))];
        let m = mutual_f1(&a, &c);
        assert_eq!((m.dm_f1, m.relation_f1), (100.0, 0.0));
    }
}
