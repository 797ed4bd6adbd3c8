//! Random well-formed RST trees for property tests and fixtures.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::discourse::{ChildLink, ConstituentNode, RstTree};

const SATELLITE_LABELS: &[&str] = &[
    "elaboration-additional",
    "causal-cause",
    "contingency-condition",
    "attribution-positive",
    "adversative-concession",
    "context-circumstance",
    "purpose-goal",
    "explanation-justify",
];

const MULTINUCLEAR_LABELS: &[&str] = &["joint-list", "joint-sequence", "same-unit", "adversative-contrast"];

#[derive(Debug, Clone, Copy)]
pub struct TreeShape {
    /// Only binary nodes.
    pub binary: bool,
    /// Largest fan-out of an n-ary node.
    pub max_children: usize,
    /// Probability that an internal node is multinuclear.
    pub multinuclear: f64,
}

impl Default for TreeShape {
    fn default() -> Self {
        TreeShape {
            binary: false,
            max_children: 4,
            multinuclear: 0.3,
        }
    }
}

impl TreeShape {
    pub fn binary() -> Self {
        TreeShape {
            binary: true,
            max_children: 2,
            multinuclear: 0.3,
        }
    }
}

/// A random valid tree over `n_edus` EDUs with GUM relation labels.
///
/// Satellites of multinuclear nodes are only placed outside the run of nuclei.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, doc_id: &str, n_edus: usize, shape: TreeShape) -> RstTree {
    assert!(n_edus >= 1);
    let root = build(rng, 1, n_edus, shape);
    RstTree::bare(doc_id, n_edus, root)
}

fn build<R: Rng + ?Sized>(rng: &mut R, lo: usize, hi: usize, shape: TreeShape) -> ConstituentNode {
    if lo == hi {
        return ConstituentNode::leaf(lo);
    }
    let width = hi + 1 - lo;
    let max_k = if shape.binary { 2 } else { shape.max_children.max(2).min(width) };
    let k = rng.gen_range(2..=max_k);
    let mut cuts: Vec<usize> = (lo + 1..=hi).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut start = lo;
    for &c in &cuts {
        parts.push((start, c - 1));
        start = c;
    }
    parts.push((start, hi));
    let nodes: Vec<ConstituentNode> = parts.iter().map(|&(a, b)| build(rng, a, b, shape)).collect();

    if rng.gen_bool(shape.multinuclear) {
        let label = *MULTINUCLEAR_LABELS.choose(rng).expect("labels");
        // a contiguous run of at least two nuclei, satellites outside it
        let run = rng.gen_range(2..=k);
        let first = rng.gen_range(0..=k - run);
        let children = nodes
            .into_iter()
            .enumerate()
            .map(|(i, node)| {
                if (first..first + run).contains(&i) {
                    ChildLink {
                        node,
                        role: crate::discourse::Role::Nucleus,
                        relation: label.to_string(),
                    }
                } else {
                    ChildLink::satellite(node, SATELLITE_LABELS.choose(rng).expect("labels"))
                }
            })
            .collect();
        ConstituentNode::internal(children)
    } else {
        let nucleus = rng.gen_range(0..k);
        let children = nodes
            .into_iter()
            .enumerate()
            .map(|(i, node)| {
                if i == nucleus {
                    ChildLink::nucleus(node)
                } else {
                    ChildLink::satellite(node, SATELLITE_LABELS.choose(rng).expect("labels"))
                }
            })
            .collect();
        ConstituentNode::internal(children)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discourse::validate_tree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_trees_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=12 {
            for shape in [TreeShape::default(), TreeShape::binary()] {
                let tree = random_tree(&mut rng, "d", n, shape);
                let report = validate_tree(&tree);
                assert!(report.is_valid(), "{report}");
                if shape.binary {
                    assert!(tree.nodes().all(|n| n.is_leaf() || n.children.len() == 2));
                }
            }
        }
    }
}
