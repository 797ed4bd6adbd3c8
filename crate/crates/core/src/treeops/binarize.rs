use crate::discourse::{ChildLink, ConstituentNode, Role, RstTree};

/// Binarize every n-ary node.
///
/// Runs of nuclei are grouped right-branching (`joint(A, joint(B, C))`).
/// Satellites are then attached to that nucleus block one at a time, those
/// to the right of it first (nearest first), then those to the left (nearest
/// first). Heads under [`to_dependencies`](super::to_dependencies) are
/// unchanged as long as no satellite sits between two nuclei of the same node.
pub fn binarize(tree: &RstTree) -> RstTree {
    let root = binarize_node(tree.root.clone());
    let mut out = RstTree::new(&tree.doc_id, &tree.genre, tree.edus.clone(), tree.tokens.clone(), root);
    out.boundaries = tree.boundaries;
    out.annotator = tree.annotator.clone();
    out
}

fn binarize_node(node: ConstituentNode) -> ConstituentNode {
    if node.is_leaf() {
        return node;
    }
    let mut children: Vec<ChildLink> = node
        .children
        .into_iter()
        .map(|c| ChildLink {
            node: binarize_node(c.node),
            role: c.role,
            relation: c.relation,
        })
        .collect();
    match children.len() {
        1 => children.pop().map(|c| c.node).expect("one child"),
        2 => ConstituentNode::internal(children),
        _ => group(children),
    }
}

fn group(children: Vec<ChildLink>) -> ConstituentNode {
    let first = children.iter().position(|c| c.role == Role::Nucleus);
    let last = children.iter().rposition(|c| c.role == Role::Nucleus);
    let (Some(first), Some(last)) = (first, last) else {
        return fold_plain(children);
    };

    let mut left = Vec::new();
    let mut block = Vec::new();
    let mut right = Vec::new();
    for (i, child) in children.into_iter().enumerate() {
        if i < first {
            left.push(child);
        } else if i <= last {
            block.push(child);
        } else {
            right.push(child);
        }
    }

    let mut core = fold_nuclei(block);
    for sat in right {
        core = ConstituentNode::internal(vec![ChildLink::nucleus(core), sat]);
    }
    for sat in left.into_iter().rev() {
        core = ConstituentNode::internal(vec![sat, ChildLink::nucleus(core)]);
    }
    core
}

/// Right-branching fold of a block that starts and ends with a nucleus.
///
/// Merged remainders are nuclei carrying the multinuclear label, so a chain of
/// nuclei keeps its label at every level. A satellite inside the block is
/// attached to the remainder on its right.
fn fold_nuclei(mut block: Vec<ChildLink>) -> ConstituentNode {
    let mut acc = block.pop().expect("block ends with a nucleus");
    while let Some(prev) = block.pop() {
        let relation = acc.relation.clone();
        let merged = match prev.role {
            Role::Nucleus => ConstituentNode::internal(vec![prev, acc]),
            Role::Satellite => ConstituentNode::internal(vec![prev, ChildLink::nucleus(acc.node)]),
        };
        acc = ChildLink {
            node: merged,
            role: Role::Nucleus,
            relation,
        };
    }
    acc.node
}

/// Right-branching fold that keeps every child's role and label; only used
/// for malformed nodes without a nucleus.
fn fold_plain(mut children: Vec<ChildLink>) -> ConstituentNode {
    let mut acc = children.pop().expect("non-empty");
    while let Some(prev) = children.pop() {
        let merged = ConstituentNode::internal(vec![prev, acc]);
        acc = ChildLink::nucleus(merged);
    }
    acc.node
}
