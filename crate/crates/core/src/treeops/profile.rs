use std::collections::{BTreeSet, HashMap};

use crate::discourse::{DepGraph, RstTree};
use crate::error::{Error, Result};

use super::depconv::percolate;

/// One row of a token-level syntax layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxToken {
    pub index: usize,
    /// Head token index, 0 for a sentence root.
    pub head: usize,
    pub label: String,
}

/// Syntactic dependencies over a document's tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxLayer {
    tokens: Vec<SyntaxToken>,
}

impl SyntaxLayer {
    pub fn new(mut tokens: Vec<SyntaxToken>) -> Result<Self> {
        tokens.sort_by_key(|t| t.index);
        let n = tokens.len();
        for (i, t) in tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(Error::parse(
                    "syntax",
                    Some(format!("token {}", t.index)),
                    "token indices must run 1..n without gaps",
                ));
            }
            if t.head > n {
                return Err(Error::parse(
                    "syntax",
                    Some(format!("token {}", t.index)),
                    format!("head {} out of range", t.head),
                ));
            }
        }
        Ok(SyntaxLayer { tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, index: usize) -> Option<&SyntaxToken> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    /// Sentence ids from syntactic connectivity: tokens sharing a root token
    /// share a sentence; ids follow the order of each sentence's first token.
    pub fn sentence_ids(&self) -> Vec<usize> {
        let mut ids = HashMap::new();
        self.tokens
            .iter()
            .map(|t| {
                let root = self.root_of(t.index);
                let next = ids.len() + 1;
                *ids.entry(root).or_insert(next)
            })
            .collect()
    }

    fn root_of(&self, index: usize) -> usize {
        let mut cur = index;
        for _ in 0..=self.tokens.len() {
            match self.token(cur) {
                Some(t) if t.head != 0 => cur = t.head,
                _ => return cur,
            }
        }
        cur
    }

    /// First token of `start..=end` whose head is the root or outside the range.
    pub fn span_head(&self, start: usize, end: usize) -> Option<&SyntaxToken> {
        (start..=end)
            .filter_map(|i| self.token(i))
            .find(|t| t.head == 0 || t.head < start || t.head > end)
    }
}

/// How the `is_subordinate` flag is computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubordStrategy {
    /// The EDU's syntactic head attaches outside the EDU with one of these labels.
    Syntax { labels: BTreeSet<String> },
    /// The EDU's gold relation stays within one sentence.
    IntraSentential,
}

impl SubordStrategy {
    pub fn default_syntax() -> Self {
        let labels = ["advcl", "acl", "acl:relcl", "ccomp", "xcomp", "csubj"]
            .into_iter()
            .map(String::from)
            .collect();
        SubordStrategy::Syntax { labels }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralProfile {
    pub edu_id: usize,
    pub n_children: usize,
    pub n_descendants: usize,
    /// EDUs in the largest constituent headed by this EDU.
    pub domain_size: usize,
    pub is_subordinate: bool,
    /// False for the root EDU.
    pub same_sentence_as_head: bool,
    pub same_paragraph_as_head: bool,
    /// Incoming syntactic relation of the EDU's head token, `_` without syntax.
    pub syn_function: String,
}

pub fn structural_profile(
    tree: &RstTree,
    deps: &DepGraph,
    syntax: Option<&SyntaxLayer>,
    strategy: &SubordStrategy,
) -> Result<Vec<StructuralProfile>> {
    let n = tree.n_edus();
    if deps.len() != n {
        return Err(Error::SegmentationMismatch {
            doc_id: tree.doc_id.clone(),
            message: format!("tree has {n} EDUs, dependency graph {}", deps.len()),
        });
    }
    if matches!(strategy, SubordStrategy::Syntax { .. }) && syntax.is_none() {
        return Err(Error::MissingSyntax(tree.doc_id.clone()));
    }
    if let Some(layer) = syntax {
        if layer.len() != tree.tokens.len() {
            return Err(Error::SegmentationMismatch {
                doc_id: tree.doc_id.clone(),
                message: format!("syntax layer has {} tokens, document {}", layer.len(), tree.tokens.len()),
            });
        }
    }

    let attachments = percolate(tree);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for node in deps.nodes() {
        if node.head != 0 {
            children[node.head].push(node.edu_id);
        }
    }

    let mut profiles = Vec::with_capacity(n);
    for node in deps.nodes() {
        let edu = node.edu_id;
        let mut descendants = 0;
        let mut stack = children[edu].clone();
        while let Some(d) = stack.pop() {
            descendants += 1;
            stack.extend(children[d].iter().copied());
        }
        let domain = attachments[edu].domain;
        let head = node.head;
        let same_sentence = head != 0 && tree.sentence_of(edu) == tree.sentence_of(head);
        let same_paragraph = head != 0 && tree.paragraph_of(edu) == tree.paragraph_of(head);
        let head_token = syntax.and_then(|layer| {
            let span = tree.edu(edu)?;
            layer.span_head(span.start, span.end)
        });
        let syn_function = match head_token {
            Some(t) if t.head == 0 => "root".to_string(),
            Some(t) => t.label.clone(),
            None => "_".to_string(),
        };
        let is_subordinate = match strategy {
            SubordStrategy::Syntax { labels } => head_token.is_some_and(|t| t.head != 0 && labels.contains(&t.label)),
            SubordStrategy::IntraSentential => same_sentence,
        };
        profiles.push(StructuralProfile {
            edu_id: edu,
            n_children: children[edu].len(),
            n_descendants: descendants,
            domain_size: domain.1 + 1 - domain.0,
            is_subordinate,
            same_sentence_as_head: same_sentence,
            same_paragraph_as_head: same_paragraph,
            syn_function,
        });
    }
    Ok(profiles)
}
