//! Brute-force reference implementations, written independently of the
//! library code they check.

#![allow(dead_code)]

use rstdiag::discourse::{ConstituentNode, Role, RstTree};

/// Every internal span of a tree, in no particular order.
pub fn internal_spans(tree: &RstTree) -> Vec<(usize, usize)> {
    fn walk(node: &ConstituentNode, out: &mut Vec<(usize, usize)>) {
        if node.children.is_empty() {
            return;
        }
        let lo = node.children.iter().map(|c| c.node.span.0).min().unwrap();
        let hi = node.children.iter().map(|c| c.node.span.1).max().unwrap();
        out.push((lo, hi));
        for c in &node.children {
            walk(&c.node, out);
        }
    }
    let mut out = Vec::new();
    walk(&tree.root, &mut out);
    out
}

/// Span precision in percent, comparing every predicted span against every
/// gold span.
pub fn span_score(gold: &RstTree, pred: &RstTree) -> f64 {
    let g = internal_spans(gold);
    let p = internal_spans(pred);
    if p.is_empty() {
        return 100.0;
    }
    let mut hit = 0usize;
    for a in &p {
        let mut found = false;
        for b in &g {
            if a.0 == b.0 && a.1 == b.1 {
                found = true;
            }
        }
        hit += usize::from(found);
    }
    100.0 * hit as f64 / p.len() as f64
}

struct Flat<'a> {
    node: &'a ConstituentNode,
    parent: Option<usize>,
    /// Position among the parent's children.
    slot: usize,
}

fn flatten<'a>(node: &'a ConstituentNode, parent: Option<usize>, slot: usize, out: &mut Vec<Flat<'a>>) {
    let me = out.len();
    out.push(Flat { node, parent, slot });
    for (i, c) in node.children.iter().enumerate() {
        flatten(&c.node, Some(me), i, out);
    }
}

/// Head EDU of a constituent: the EDU reached by always descending into the
/// first nucleus.
fn lexical_head(node: &ConstituentNode) -> usize {
    let mut n = node;
    loop {
        if let Some(e) = n.leaf_edu {
            return e;
        }
        n = &n
            .children
            .iter()
            .find(|c| c.role == Role::Nucleus)
            .unwrap_or(&n.children[0])
            .node;
    }
}

/// `(head, relation)` for each EDU 1..=n; the root EDU gets `(0, "ROOT")`.
///
/// For EDU `e` take the widest constituent whose head is `e`. If that is the
/// root, `e` is the document head. Otherwise it hangs off its parent: a
/// satellite attaches to the parent's head, a later nucleus to the head of
/// the nucleus immediately before it.
pub fn dependencies(tree: &RstTree) -> Vec<(usize, String)> {
    let mut nodes = Vec::new();
    flatten(&tree.root, None, 0, &mut nodes);
    let heads: Vec<usize> = nodes.iter().map(|f| lexical_head(f.node)).collect();
    (1..=tree.n_edus())
        .map(|e| {
            let top = (0..nodes.len())
                .filter(|&i| heads[i] == e)
                .max_by_key(|&i| nodes[i].node.span.1 - nodes[i].node.span.0)
                .expect("every EDU heads its leaf");
            let Some(parent) = nodes[top].parent else {
                return (0, "ROOT".to_string());
            };
            let siblings = &nodes[parent].node.children;
            let link = &siblings[nodes[top].slot];
            match link.role {
                Role::Satellite => (heads[parent], link.relation.clone()),
                Role::Nucleus => {
                    let prev = siblings[..nodes[top].slot]
                        .iter()
                        .rev()
                        .find(|c| c.role == Role::Nucleus)
                        .expect("a non-initial nucleus has a predecessor");
                    (lexical_head(&prev.node), link.relation.clone())
                }
            }
        })
        .collect()
}
