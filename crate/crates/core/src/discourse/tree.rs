//! Constituent RST trees.

use super::relations::SPAN;
use super::text::{Boundaries, BoundarySource, Edu, Token};

/// Nuclearity of a child within its parent constituent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Nucleus,
    Satellite,
}

impl Role {
    pub fn code(self) -> char {
        match self {
            Role::Nucleus => 'N',
            Role::Satellite => 'S',
        }
    }
}

/// A child edge: the subtree, its nuclearity and its relation to the parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildLink {
    pub node: ConstituentNode,
    pub role: Role,
    /// `span` for nuclei of mononuclear nodes.
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstituentNode {
    pub id: usize,
    /// Inclusive EDU range.
    pub span: (usize, usize),
    pub children: Vec<ChildLink>,
    pub leaf_edu: Option<usize>,
}

impl ConstituentNode {
    pub fn leaf(edu: usize) -> Self {
        ConstituentNode {
            id: 0,
            span: (edu, edu),
            children: Vec::new(),
            leaf_edu: Some(edu),
        }
    }

    /// Internal node spanning its children; ids are assigned by [`RstTree::new`].
    pub fn internal(children: Vec<ChildLink>) -> Self {
        let start = children.iter().map(|c| c.node.span.0).min().unwrap_or(0);
        let end = children.iter().map(|c| c.node.span.1).max().unwrap_or(0);
        ConstituentNode {
            id: 0,
            span: (start, end),
            children,
            leaf_edu: None,
        }
    }

    /// Mononuclear pair; children are ordered by position.
    pub fn mono(nucleus: ConstituentNode, satellite: ConstituentNode, relation: &str) -> Self {
        let n = ChildLink::nucleus(nucleus);
        let s = ChildLink::satellite(satellite, relation);
        let mut children = vec![n, s];
        children.sort_by_key(|c| c.node.span.0);
        Self::internal(children)
    }

    /// Multinuclear node whose nuclei all carry `relation`.
    pub fn multi(nuclei: Vec<ConstituentNode>, relation: &str) -> Self {
        Self::internal(
            nuclei
                .into_iter()
                .map(|n| ChildLink {
                    node: n,
                    role: Role::Nucleus,
                    relation: relation.to_string(),
                })
                .collect(),
        )
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn n_edus(&self) -> usize {
        self.span.1 + 1 - self.span.0
    }

    pub fn nuclei(&self) -> impl Iterator<Item = &ChildLink> {
        self.children.iter().filter(|c| c.role == Role::Nucleus)
    }

    pub fn is_multinuclear(&self) -> bool {
        self.nuclei().count() >= 2
    }

    /// Nuclearity pattern of the children, e.g. `NS`.
    pub fn nuclearity(&self) -> String {
        self.children.iter().map(|c| c.role.code()).collect()
    }

    /// The relation a binary internal node expresses: the satellite's label,
    /// or the shared nucleus label of a multinuclear node.
    pub fn relation(&self) -> Option<&str> {
        if let Some(sat) = self.children.iter().find(|c| c.role == Role::Satellite) {
            return Some(&sat.relation);
        }
        if self.is_multinuclear() {
            return self.children.iter().map(|c| c.relation.as_str()).find(|r| *r != SPAN);
        }
        None
    }

    /// Pre-order traversal.
    pub fn iter(&self) -> NodeIter<'_> {
        NodeIter { stack: vec![self] }
    }

    fn renumber(&mut self, next: &mut usize) {
        self.id = *next;
        *next += 1;
        for child in &mut self.children {
            child.node.renumber(next);
        }
    }
}

impl ChildLink {
    pub fn nucleus(node: ConstituentNode) -> Self {
        ChildLink {
            node,
            role: Role::Nucleus,
            relation: SPAN.to_string(),
        }
    }

    pub fn satellite(node: ConstituentNode, relation: &str) -> Self {
        ChildLink {
            node,
            role: Role::Satellite,
            relation: relation.to_string(),
        }
    }
}

pub struct NodeIter<'a> {
    stack: Vec<&'a ConstituentNode>,
}

impl<'a> Iterator for NodeIter<'a> {
    type Item = &'a ConstituentNode;

    fn next(&mut self) -> Option<Self::Item> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev().map(|c| &c.node));
        Some(node)
    }
}

/// A gold or predicted constituent discourse tree over a document's EDUs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RstTree {
    pub doc_id: String,
    pub genre: String,
    pub edus: Vec<Edu>,
    pub tokens: Vec<Token>,
    pub root: ConstituentNode,
    pub boundaries: Boundaries,
    /// Set for secondary-annotator trees.
    pub annotator: Option<String>,
}

impl RstTree {
    /// Assemble a tree, numbering nodes in pre-order from 1.
    pub fn new(doc_id: &str, genre: &str, edus: Vec<Edu>, tokens: Vec<Token>, mut root: ConstituentNode) -> Self {
        root.renumber(&mut 1);
        RstTree {
            doc_id: doc_id.to_string(),
            genre: genre.to_string(),
            edus,
            tokens,
            root,
            boundaries: Boundaries {
                sentences: BoundarySource::Heuristic,
                paragraphs: BoundarySource::Heuristic,
            },
            annotator: None,
        }
    }

    /// A tree with one placeholder token per EDU; used for structure-only work.
    pub fn bare(doc_id: &str, n_edus: usize, root: ConstituentNode) -> Self {
        let edus = (1..=n_edus)
            .map(|i| Edu {
                id: i,
                start: i,
                end: i,
                doc_id: doc_id.to_string(),
            })
            .collect();
        let tokens = (1..=n_edus)
            .map(|i| Token {
                index: i,
                form: format!("w{i}"),
                is_lexical: true,
                sentence_id: i,
                paragraph_id: 1,
            })
            .collect();
        Self::new(doc_id, "unknown", edus, tokens, root)
    }

    pub fn n_edus(&self) -> usize {
        self.edus.len()
    }

    pub fn nodes(&self) -> NodeIter<'_> {
        self.root.iter()
    }

    pub fn edu(&self, id: usize) -> Option<&Edu> {
        id.checked_sub(1).and_then(|i| self.edus.get(i))
    }

    pub fn edu_tokens(&self, id: usize) -> &[Token] {
        match self.edu(id) {
            Some(edu) if !edu.is_empty() => &self.tokens[edu.start - 1..edu.end],
            _ => &[],
        }
    }

    pub fn edu_text(&self, id: usize) -> String {
        self.edu_tokens(id)
            .iter()
            .map(|t| t.form.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// EDU containing the token at `index`.
    pub fn edu_of_token(&self, index: usize) -> Option<usize> {
        let pos = self.edus.partition_point(|e| e.end < index);
        self.edus.get(pos).filter(|e| e.contains(index)).map(|e| e.id)
    }

    /// Sentence id of an EDU (that of its first token).
    pub fn sentence_of(&self, edu: usize) -> usize {
        self.edu_tokens(edu).first().map_or(0, |t| t.sentence_id)
    }

    pub fn paragraph_of(&self, edu: usize) -> usize {
        self.edu_tokens(edu).first().map_or(0, |t| t.paragraph_id)
    }

    /// Replace sentence ids, e.g. with those derived from a syntax layer.
    pub fn with_sentence_ids(mut self, ids: &[usize], source: BoundarySource) -> Self {
        for (token, &id) in self.tokens.iter_mut().zip(ids) {
            token.sentence_id = id;
        }
        self.boundaries.sentences = source;
        self
    }

    /// Fine labels used anywhere in the tree, excluding `span`.
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.nodes()
            .flat_map(|n| n.children.iter())
            .map(|c| c.relation.as_str())
            .filter(|r| *r != SPAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preorder_ids_and_spans() {
        let root = ConstituentNode::mono(
            ConstituentNode::mono(ConstituentNode::leaf(2), ConstituentNode::leaf(1), "cause"),
            ConstituentNode::leaf(3),
            "elaboration",
        );
        let tree = RstTree::bare("d", 3, root);
        let ids: Vec<_> = tree.nodes().map(|n| (n.id, n.span)).collect();
        assert_eq!(ids, vec![(1, (1, 3)), (2, (1, 2)), (3, (1, 1)), (4, (2, 2)), (5, (3, 3))]);
        assert_eq!(tree.root.nuclearity(), "NS");
        assert_eq!(tree.root.children[0].node.nuclearity(), "SN");
        assert_eq!(tree.root.relation(), Some("elaboration"));
    }

    #[test]
    fn token_lookup() {
        let tree = RstTree::bare("d", 3, ConstituentNode::multi((1..=3).map(ConstituentNode::leaf).collect(), "joint"));
        assert_eq!(tree.edu_of_token(2), Some(2));
        assert_eq!(tree.edu_of_token(9), None);
        assert_eq!(tree.root.relation(), Some("joint"));
        assert!(tree.root.is_multinuclear());
    }
}
