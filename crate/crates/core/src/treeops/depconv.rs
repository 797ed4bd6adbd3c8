use crate::discourse::{ConstituentNode, DepGraph, DepNode, RelationScheme, Role, RstTree, ROOT};
use crate::error::Result;

/// Per-EDU result of head percolation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Attachment {
    pub head: usize,
    pub relation: String,
    /// Span of the largest constituent headed by the EDU.
    pub domain: (usize, usize),
}

/// Convert a constituent tree to a discourse dependency graph.
///
/// The head of a leaf is its EDU and the head of an internal node is the head
/// of its leftmost nucleus. A satellite's head depends on the head of its
/// parent, labeled with the satellite's relation. Within a multinuclear node
/// each further nucleus depends on the nucleus before it, labeled with the
/// multinuclear relation. The head of the root is the document root (`ROOT`).
pub fn to_dependencies(tree: &RstTree, scheme: &RelationScheme) -> Result<DepGraph> {
    let attachments = percolate(tree);
    let nodes = attachments
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(edu, a)| {
            Ok(DepNode {
                edu_id: edu,
                head: a.head,
                class: scheme.class_of(&a.relation)?,
                relation: a.relation,
                text: tree.edu_text(edu),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DepGraph::new(&tree.doc_id, nodes)
}

/// Head attachments indexed by EDU id (index 0 unused).
pub(crate) fn percolate(tree: &RstTree) -> Vec<Attachment> {
    let n = tree.n_edus();
    let mut out = vec![
        Attachment {
            head: 0,
            relation: String::new(),
            domain: (0, 0),
        };
        n + 1
    ];
    let root_head = head_of(&tree.root, &mut out);
    if root_head <= n {
        out[root_head] = Attachment {
            head: 0,
            relation: ROOT.to_string(),
            domain: tree.root.span,
        };
    }
    out
}

fn head_of(node: &ConstituentNode, out: &mut [Attachment]) -> usize {
    if let Some(edu) = node.leaf_edu {
        return edu;
    }
    let heads: Vec<usize> = node.children.iter().map(|c| head_of(&c.node, out)).collect();
    let lead = node
        .children
        .iter()
        .position(|c| c.role == Role::Nucleus)
        .unwrap_or(0);
    let node_head = heads[lead];
    let mut previous_nucleus: Option<usize> = None;
    for (child, &h) in node.children.iter().zip(&heads) {
        let governor = match child.role {
            Role::Nucleus => {
                let gov = previous_nucleus;
                previous_nucleus = Some(h);
                match gov {
                    Some(g) => g,
                    None => continue,
                }
            }
            Role::Satellite => node_head,
        };
        if h < out.len() {
            out[h] = Attachment {
                head: governor,
                relation: child.relation.clone(),
                domain: child.node.span,
            };
        }
    }
    node_head
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discourse::RelationScheme;

    fn scheme() -> RelationScheme {
        RelationScheme::parse("t", "#! fallback = hyphen-prefix\n").unwrap()
    }

    fn heads(tree: &RstTree) -> Vec<(usize, String)> {
        to_dependencies(tree, &scheme())
            .unwrap()
            .nodes()
            .iter()
            .map(|n| (n.head, n.relation.clone()))
            .collect()
    }

    #[test]
    fn satellite_first_pair() {
        let tree = RstTree::bare(
            "d",
            2,
            ConstituentNode::mono(ConstituentNode::leaf(2), ConstituentNode::leaf(1), "cause"),
        );
        assert_eq!(heads(&tree), vec![(2, "cause".into()), (0, ROOT.into())]);
    }

    #[test]
    fn multinuclear_pair() {
        let tree = RstTree::bare(
            "d",
            2,
            ConstituentNode::multi(vec![ConstituentNode::leaf(1), ConstituentNode::leaf(2)], "joint"),
        );
        assert_eq!(heads(&tree), vec![(0, ROOT.into()), (1, "joint".into())]);
    }

    #[test]
    fn nested_elaboration_over_cause() {
        let tree = RstTree::bare(
            "d",
            3,
            ConstituentNode::mono(
                ConstituentNode::mono(ConstituentNode::leaf(2), ConstituentNode::leaf(1), "cause"),
                ConstituentNode::leaf(3),
                "elaboration",
            ),
        );
        assert_eq!(
            heads(&tree),
            vec![(2, "cause".into()), (0, ROOT.into()), (2, "elaboration".into())]
        );
        let attachments = percolate(&tree);
        assert_eq!(attachments[2].domain, (1, 3));
        assert_eq!(attachments[1].domain, (1, 1));
    }

    #[test]
    fn multinuclear_chain() {
        let tree = RstTree::bare(
            "d",
            3,
            ConstituentNode::multi((1..=3).map(ConstituentNode::leaf).collect(), "joint"),
        );
        assert_eq!(
            heads(&tree),
            vec![(0, ROOT.into()), (1, "joint".into()), (2, "joint".into())]
        );
    }
}
