use std::fmt;

use super::relations::SPAN;
use super::text::check_partition;
use super::tree::{ConstituentNode, Role, RstTree};

/// One violated tree invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A node's span differs from the union of its children's spans.
    SpanMismatch { node: usize, claimed: (usize, usize), children: (usize, usize) },
    /// Children are out of order, overlap or leave a gap.
    ChildGap { node: usize },
    /// Leaf status and span width disagree.
    LeafSpan { node: usize },
    /// Non-leaf without a nucleus child.
    NoNucleus { node: usize },
    /// Nuclei of a multinuclear node carry different labels.
    MultinuclearLabels { node: usize, labels: Vec<String> },
    /// Nucleus of a mononuclear node not labeled `span`.
    NucleusLabel { node: usize, label: String },
    /// Satellite labeled `span` or with an empty label.
    SatelliteLabel { node: usize },
    /// Root span differs from 1..=n.
    RootSpan { span: (usize, usize), n_edus: usize },
    /// An EDU is covered by zero or several leaves.
    EduCoverage { edu: usize, leaves: usize },
    /// Token/EDU partition broken.
    Partition(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SpanMismatch { node, claimed, children } => write!(
                f,
                "node {node} claims EDUs {}-{} but its children span {}-{}",
                claimed.0, claimed.1, children.0, children.1
            ),
            Violation::ChildGap { node } => write!(f, "children of node {node} are not contiguous"),
            Violation::LeafSpan { node } => write!(f, "node {node}: leaf status does not match span width"),
            Violation::NoNucleus { node } => write!(f, "node {node} has no nucleus child"),
            Violation::MultinuclearLabels { node, labels } => {
                write!(f, "multinuclear node {node} mixes labels {}", labels.join(", "))
            }
            Violation::NucleusLabel { node, label } => {
                write!(f, "nucleus under mononuclear node {node} carries `{label}` instead of `span`")
            }
            Violation::SatelliteLabel { node } => write!(f, "satellite under node {node} has no relation label"),
            Violation::RootSpan { span, n_edus } => {
                write!(f, "root spans {}-{} but the document has {n_edus} EDUs", span.0, span.1)
            }
            Violation::EduCoverage { edu, leaves } => write!(f, "EDU {edu} is covered by {leaves} leaves"),
            Violation::Partition(m) => write!(f, "{m}"),
        }
    }
}

/// Every invariant violated by a tree; empty for a well-formed tree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

pub fn validate_tree(tree: &RstTree) -> ValidationReport {
    let mut violations = Vec::new();
    let n = tree.n_edus();
    if tree.root.span != (1, n) {
        violations.push(Violation::RootSpan { span: tree.root.span, n_edus: n });
    }
    if let Err(e) = check_partition(&tree.doc_id, &tree.tokens, &tree.edus) {
        violations.push(Violation::Partition(e.to_string()));
    }
    let mut coverage = vec![0usize; n + 1];
    for node in tree.nodes() {
        check_node(node, &mut violations);
        if let Some(edu) = node.leaf_edu {
            if (1..=n).contains(&edu) {
                coverage[edu] += 1;
            } else {
                violations.push(Violation::EduCoverage { edu, leaves: 1 });
            }
        }
    }
    for (edu, &leaves) in coverage.iter().enumerate().skip(1) {
        if leaves != 1 {
            violations.push(Violation::EduCoverage { edu, leaves });
        }
    }
    ValidationReport { violations }
}

fn check_node(node: &ConstituentNode, out: &mut Vec<Violation>) {
    let single = node.span.0 == node.span.1;
    if node.is_leaf() {
        if !single || node.leaf_edu != Some(node.span.0) {
            out.push(Violation::LeafSpan { node: node.id });
        }
        return;
    }
    if node.leaf_edu.is_some() {
        out.push(Violation::LeafSpan { node: node.id });
    }

    let mut expected = node.children[0].node.span.0;
    for child in &node.children {
        if child.node.span.0 != expected {
            out.push(Violation::ChildGap { node: node.id });
            break;
        }
        expected = child.node.span.1 + 1;
    }
    let lo = node.children.iter().map(|c| c.node.span.0).min().unwrap_or(0);
    let hi = node.children.iter().map(|c| c.node.span.1).max().unwrap_or(0);
    if (lo, hi) != node.span {
        out.push(Violation::SpanMismatch {
            node: node.id,
            claimed: node.span,
            children: (lo, hi),
        });
    }

    let nuclei: Vec<_> = node.nuclei().collect();
    match nuclei.len() {
        0 => out.push(Violation::NoNucleus { node: node.id }),
        1 => {
            if nuclei[0].relation != SPAN {
                out.push(Violation::NucleusLabel {
                    node: node.id,
                    label: nuclei[0].relation.clone(),
                });
            }
        }
        _ => {
            let mut labels: Vec<String> = nuclei.iter().map(|c| c.relation.clone()).collect();
            labels.sort();
            labels.dedup();
            if labels.len() > 1 || labels[0] == SPAN {
                out.push(Violation::MultinuclearLabels { node: node.id, labels });
            }
        }
    }
    for child in node.children.iter().filter(|c| c.role == Role::Satellite) {
        if child.relation.is_empty() || child.relation == SPAN {
            out.push(Violation::SatelliteLabel { node: node.id });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discourse::tree::ChildLink;

    fn two_edu() -> RstTree {
        RstTree::bare(
            "d",
            2,
            ConstituentNode::mono(ConstituentNode::leaf(1), ConstituentNode::leaf(2), "cause"),
        )
    }

    #[test]
    fn well_formed_two_edu_tree() {
        assert!(validate_tree(&two_edu()).is_valid());
    }

    #[test]
    fn span_mismatch() {
        let mut tree = RstTree::bare(
            "d",
            3,
            ConstituentNode::mono(
                ConstituentNode::mono(ConstituentNode::leaf(1), ConstituentNode::leaf(2), "cause"),
                ConstituentNode::leaf(3),
                "elaboration",
            ),
        );
        tree.root.children[0].node.span = (1, 3);
        let report = validate_tree(&tree);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::SpanMismatch { claimed: (1, 3), children: (1, 2), .. })));
    }

    #[test]
    fn missing_nucleus() {
        let root = ConstituentNode::internal(vec![
            ChildLink::satellite(ConstituentNode::leaf(1), "cause"),
            ChildLink::satellite(ConstituentNode::leaf(2), "cause"),
        ]);
        let report = validate_tree(&RstTree::bare("d", 2, root));
        assert!(report.violations.iter().any(|v| matches!(v, Violation::NoNucleus { .. })));
    }

    #[test]
    fn mixed_multinuclear_labels_and_nucleus_label() {
        let root = ConstituentNode::internal(vec![
            ChildLink {
                node: ConstituentNode::leaf(1),
                role: Role::Nucleus,
                relation: "joint".into(),
            },
            ChildLink {
                node: ConstituentNode::leaf(2),
                role: Role::Nucleus,
                relation: "list".into(),
            },
        ]);
        let report = validate_tree(&RstTree::bare("d", 2, root));
        assert!(matches!(report.violations[0], Violation::MultinuclearLabels { .. }));

        let mut tree = two_edu();
        tree.root.children[0].relation = "cause".into();
        assert!(matches!(validate_tree(&tree).violations[0], Violation::NucleusLabel { .. }));
    }

    #[test]
    fn coverage_and_root_span() {
        let tree = RstTree::bare(
            "d",
            3,
            ConstituentNode::mono(ConstituentNode::leaf(1), ConstituentNode::leaf(2), "cause"),
        );
        let report = validate_tree(&tree);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::RootSpan { .. })));
        assert!(report.violations.iter().any(|v| matches!(v, Violation::EduCoverage { edu: 3, leaves: 0 })));
    }
}
