//! Discourse dependency graphs: one node per EDU, pointing at its head EDU.

use crate::error::{Error, Result};

use super::relations::ROOT;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepNode {
    pub edu_id: usize,
    /// Head EDU id, 0 for the root.
    pub head: usize,
    pub relation: String,
    pub class: String,
    /// EDU text, carried for readable exports.
    pub text: String,
}

/// A validated dependency tree over a document's EDUs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepGraph {
    doc_id: String,
    nodes: Vec<DepNode>,
}

impl DepGraph {
    /// Build a graph, checking that ids are 1..=n, heads are in range, exactly
    /// one node is the root and head links are acyclic.
    pub fn new(doc_id: &str, mut nodes: Vec<DepNode>) -> Result<Self> {
        let fail = |message: String| {
            Err(Error::InvalidGraph {
                doc_id: doc_id.to_string(),
                message,
            })
        };
        nodes.sort_by_key(|n| n.edu_id);
        let n = nodes.len();
        if n == 0 {
            return fail("no nodes".to_string());
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.edu_id != i + 1 {
                if i > 0 && nodes[i - 1].edu_id == node.edu_id {
                    return fail(format!("duplicate EDU id {}", node.edu_id));
                }
                return fail(format!("EDU ids are not contiguous from 1 (found {})", node.edu_id));
            }
            if node.head > n {
                return fail(format!("head {} of EDU {} out of range 0..={n}", node.head, node.edu_id));
            }
            if node.head == node.edu_id {
                return fail(format!("EDU {} heads itself", node.edu_id));
            }
        }
        let roots: Vec<_> = nodes.iter().filter(|n| n.head == 0).map(|n| n.edu_id).collect();
        match roots.len() {
            0 => return fail("no root".to_string()),
            1 => {}
            _ => return fail(format!("multiple roots: {roots:?}")),
        }
        for start in 1..=n {
            let mut cur = start;
            let mut steps = 0;
            while cur != 0 {
                cur = nodes[cur - 1].head;
                steps += 1;
                if steps > n {
                    return fail(format!("cycle through EDU {start}"));
                }
            }
        }
        Ok(DepGraph {
            doc_id: doc_id.to_string(),
            nodes,
        })
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn nodes(&self) -> &[DepNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, edu: usize) -> Option<&DepNode> {
        edu.checked_sub(1).and_then(|i| self.nodes.get(i))
    }

    pub fn head_of(&self, edu: usize) -> Option<usize> {
        self.node(edu).map(|n| n.head)
    }

    pub fn root(&self) -> usize {
        self.nodes
            .iter()
            .find(|n| n.head == 0)
            .map(|n| n.edu_id)
            .expect("validated graph has a root")
    }

    pub fn dependents(&self, edu: usize) -> impl Iterator<Item = &DepNode> {
        self.nodes.iter().filter(move |n| n.head == edu)
    }

    /// The relation instance `dependent → head`, if present.
    pub fn relation_instance(&self, dependent: usize, head: usize) -> Option<&DepNode> {
        self.node(dependent).filter(|n| n.head == head)
    }

    /// Number of head links from `edu` to the root.
    pub fn depth(&self, edu: usize) -> usize {
        let mut depth = 0;
        let mut cur = edu;
        while let Some(n) = self.node(cur) {
            if n.head == 0 {
                break;
            }
            cur = n.head;
            depth += 1;
        }
        depth
    }

    pub fn is_root_label(label: &str) -> bool {
        label == ROOT
    }
}
