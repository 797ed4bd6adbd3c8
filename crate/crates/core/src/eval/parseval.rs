use std::collections::HashMap;

use crate::discourse::{RelationScheme, RstTree};
use crate::error::{Error, Result};
use crate::treeops::binarize;

/// Granularity of relation matching.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LabelLevel {
    #[default]
    Class,
    Fine,
}

/// Matched span counts; sum over documents for micro averages.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParsevalCounts {
    pub span: usize,
    pub nuclearity: usize,
    pub relation: usize,
    /// Internal spans of the predicted tree.
    pub total: usize,
}

impl ParsevalCounts {
    pub fn add(&mut self, other: &ParsevalCounts) {
        self.span += other.span;
        self.nuclearity += other.nuclearity;
        self.relation += other.relation;
        self.total += other.total;
    }

    pub fn score(&self) -> ParsevalScore {
        let pct = |x: usize| if self.total == 0 { 100.0 } else { 100.0 * x as f64 / self.total as f64 };
        ParsevalScore {
            s: pct(self.span),
            n: pct(self.nuclearity),
            r: pct(self.relation),
            n_spans: self.total,
            counts: *self,
        }
    }
}

/// Original Parseval scores in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalScore {
    pub s: f64,
    pub n: f64,
    pub r: f64,
    pub n_spans: usize,
    pub counts: ParsevalCounts,
}

struct SpanInfo {
    nuclearity: String,
    relation: String,
}

/// Score `pred` against `gold` over internal-node EDU spans, root included.
///
/// Both trees are binarized first. S counts predicted spans present in gold,
/// N also requires the same nuclearity pattern, R the same relation (the
/// satellite's label, or the multinuclear label). A document of one EDU has
/// no internal spans and scores 100 on every metric.
pub fn parseval(gold: &RstTree, pred: &RstTree, scheme: &RelationScheme, level: LabelLevel) -> Result<ParsevalScore> {
    let spans = |t: &RstTree| t.edus.iter().map(|e| (e.start, e.end)).collect::<Vec<_>>();
    if gold.n_edus() != pred.n_edus() || spans(gold) != spans(pred) {
        return Err(Error::SegmentationMismatch {
            doc_id: gold.doc_id.clone(),
            message: format!("gold has {} EDUs, prediction {}", gold.n_edus(), pred.n_edus()),
        });
    }
    let gold_spans = span_table(&binarize(gold), scheme, level)?;
    let pred_spans = span_table(&binarize(pred), scheme, level)?;
    let mut counts = ParsevalCounts {
        total: pred_spans.len(),
        ..Default::default()
    };
    for (span, p) in &pred_spans {
        if let Some(g) = gold_spans.get(span) {
            counts.span += 1;
            counts.nuclearity += usize::from(g.nuclearity == p.nuclearity);
            counts.relation += usize::from(g.relation == p.relation);
        }
    }
    Ok(counts.score())
}

fn span_table(tree: &RstTree, scheme: &RelationScheme, level: LabelLevel) -> Result<HashMap<(usize, usize), SpanInfo>> {
    tree.nodes()
        .filter(|n| !n.is_leaf())
        .map(|n| {
            let label = n.relation().unwrap_or_default();
            let relation = match level {
                LabelLevel::Class => scheme.class_of(label)?,
                LabelLevel::Fine => label.to_lowercase(),
            };
            Ok((
                n.span,
                SpanInfo {
                    nuclearity: n.nuclearity(),
                    relation,
                },
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discourse::ConstituentNode as C;

    fn scheme() -> RelationScheme {
        RelationScheme::gum()
    }

    fn left() -> RstTree {
        RstTree::bare(
            "d",
            3,
            C::mono(
                C::mono(C::leaf(1), C::leaf(2), "elaboration-additional"),
                C::leaf(3),
                "causal-cause",
            ),
        )
    }

    #[test]
    fn identity() {
        let s = parseval(&left(), &left(), &scheme(), LabelLevel::Fine).unwrap();
        assert_eq!((s.s, s.n, s.r, s.n_spans), (100.0, 100.0, 100.0, 2));
    }

    #[test]
    fn different_bracketing() {
        let right = RstTree::bare(
            "d",
            3,
            C::mono(
                C::leaf(1),
                C::mono(C::leaf(2), C::leaf(3), "causal-cause"),
                "elaboration-additional",
            ),
        );
        let s = parseval(&left(), &right, &scheme(), LabelLevel::Class).unwrap();
        assert_eq!(s.s, 50.0);
        // the shared root span has NS in both but a different relation
        assert_eq!(s.n, 50.0);
        assert_eq!(s.r, 0.0);
    }

    #[test]
    fn class_versus_fine() {
        let other = RstTree::bare(
            "d",
            3,
            C::mono(
                C::mono(C::leaf(1), C::leaf(2), "elaboration-attribute"),
                C::leaf(3),
                "causal-cause",
            ),
        );
        assert_eq!(parseval(&left(), &other, &scheme(), LabelLevel::Class).unwrap().r, 100.0);
        assert_eq!(parseval(&left(), &other, &scheme(), LabelLevel::Fine).unwrap().r, 50.0);
    }

    #[test]
    fn segmentation_mismatch() {
        let two = RstTree::bare("d", 2, C::mono(C::leaf(1), C::leaf(2), "causal-cause"));
        assert!(matches!(
            parseval(&left(), &two, &scheme(), LabelLevel::Class),
            Err(Error::SegmentationMismatch { .. })
        ));
    }
}
