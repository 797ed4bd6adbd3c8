//! RST-DT `dis` constituent format.
//!
//! ```text
//! ( Root (span 1 2)
//!   ( Nucleus (leaf 1) (rel2par span) (text _!It rained ._!) )
//!   ( Satellite (leaf 2) (rel2par result) (text _!We stayed home ._!) ) )
//! ```

use std::path::Path;

use crate::discourse::{tokenize_segments, validate_tree, ChildLink, ConstituentNode, Role, RstTree};
use crate::error::{Error, Result};

use super::{doc_id_from_path, ReadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Root,
    Nucleus,
    Satellite,
}

#[derive(Debug)]
struct DisNode {
    kind: Kind,
    line: usize,
    span: Option<(usize, usize)>,
    leaf: Option<usize>,
    rel2par: Option<String>,
    text: Option<String>,
    children: Vec<DisNode>,
}

pub fn read_dis(path: &Path, opts: &ReadOptions) -> Result<RstTree> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dis(&doc_id_from_path(path), &text, opts)
}

pub fn parse_dis(doc_id: &str, text: &str, opts: &ReadOptions) -> Result<RstTree> {
    let text = text.replace("\r\n", "\n");
    let mut parser = Parser {
        src: &text,
        pos: 0,
        doc_id,
    };
    parser.skip_ws();
    let root = parser.node()?;
    parser.skip_ws();
    if parser.pos < text.len() {
        return Err(parser.error("trailing content after the root node"));
    }
    if root.kind != Kind::Root {
        return Err(parser.error("outermost node must be Root"));
    }

    let mut segments = Vec::new();
    let node = convert(&root, &mut segments).map_err(|(line, m)| {
        Error::parse("dis", Some(format!("{doc_id}:{line}")), m)
    })?;
    let segment_refs: Vec<&str> = segments.iter().map(String::as_str).collect();
    let seg = tokenize_segments(doc_id, &segment_refs, &opts.stoplist);
    let mut tree = RstTree::new(doc_id, &opts.genre_for(doc_id), seg.edus, seg.tokens, node);
    tree.boundaries = seg.boundaries;
    tree.annotator = opts.annotator.clone();
    let report = validate_tree(&tree);
    if !report.is_valid() {
        return Err(Error::parse("dis", Some(doc_id.to_string()), format!("tree violates invariants: {report}")));
    }
    Ok(tree)
}

fn convert(node: &DisNode, segments: &mut Vec<String>) -> std::result::Result<ConstituentNode, (usize, String)> {
    if node.children.is_empty() {
        let Some(k) = node.leaf else {
            return Err((node.line, "node has neither children nor a leaf declaration".into()));
        };
        let Some(text) = &node.text else {
            return Err((node.line, format!("leaf {k} without text")));
        };
        if k != segments.len() + 1 {
            return Err((node.line, format!("leaf {k} out of order, expected {}", segments.len() + 1)));
        }
        segments.push(text.clone());
        return Ok(ConstituentNode::leaf(k));
    }
    if node.leaf.is_some() {
        return Err((node.line, "leaf declaration on a node with children".into()));
    }
    let mut children = Vec::with_capacity(node.children.len());
    for child in &node.children {
        let built = convert(child, segments)?;
        let relation = child
            .rel2par
            .clone()
            .ok_or_else(|| (child.line, "child node without rel2par".to_string()))?;
        let role = match child.kind {
            Kind::Nucleus => Role::Nucleus,
            Kind::Satellite => Role::Satellite,
            Kind::Root => return Err((child.line, "nested Root node".into())),
        };
        children.push(ChildLink {
            node: built,
            role,
            relation,
        });
    }
    let built = ConstituentNode::internal(children);
    match node.span {
        Some(span) if span == built.span => Ok(built),
        Some(span) => Err((
            node.line,
            format!("declared span {span:?} disagrees with children covering {:?}", built.span),
        )),
        None => Err((node.line, "internal node without span declaration".into())),
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    doc_id: &'a str,
}

impl Parser<'_> {
    fn line(&self) -> usize {
        self.src[..self.pos].matches('\n').count() + 1
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::parse("dis", Some(format!("{}:{}", self.doc_id, self.line())), message)
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else if self.rest().is_empty() {
            Err(self.error(format!("unbalanced parentheses: expected `{c}` at end of input")))
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn atom(&mut self) -> Result<&str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected an atom"));
        }
        let start = self.pos;
        self.pos += len;
        Ok(&self.src[start..start + len])
    }

    fn number(&mut self) -> Result<usize> {
        let atom = self.atom()?.to_string();
        atom.parse().map_err(|_| self.error(format!("expected a number, found `{atom}`")))
    }

    /// Peek at the atom after an opening parenthesis.
    fn peek_head(&self) -> Option<&str> {
        let rest = self.rest().strip_prefix('(')?.trim_start();
        let len = rest.find(|c: char| c.is_whitespace() || c == '(' || c == ')')?;
        Some(&rest[..len])
    }

    fn node(&mut self) -> Result<DisNode> {
        self.expect('(')?;
        let line = self.line();
        let head = self.atom()?.to_string();
        let kind = match head.as_str() {
            "Root" => Kind::Root,
            "Nucleus" => Kind::Nucleus,
            "Satellite" => Kind::Satellite,
            other => return Err(self.error(format!("unknown node kind `{other}`"))),
        };
        let mut node = DisNode {
            kind,
            line,
            span: None,
            leaf: None,
            rel2par: None,
            text: None,
            children: Vec::new(),
        };
        loop {
            self.skip_ws();
            if self.rest().is_empty() {
                return Err(self.error("unbalanced parentheses: unexpected end of input"));
            }
            if self.rest().starts_with(')') {
                self.pos += 1;
                return Ok(node);
            }
            match self.peek_head() {
                Some("Nucleus" | "Satellite" | "Root") => node.children.push(self.node()?),
                Some(_) => self.attribute(&mut node)?,
                None => return Err(self.error("expected `(` or `)`")),
            }
        }
    }

    fn attribute(&mut self, node: &mut DisNode) -> Result<()> {
        self.expect('(')?;
        let name = self.atom()?.to_string();
        match name.as_str() {
            "span" => node.span = Some((self.number()?, self.number()?)),
            "leaf" => node.leaf = Some(self.number()?),
            "rel2par" => node.rel2par = Some(self.atom()?.to_string()),
            "text" => {
                self.skip_ws();
                let rest = self.rest();
                let body = rest
                    .strip_prefix("_!")
                    .ok_or_else(|| self.error("text payload must start with `_!`"))?;
                let end = body
                    .find("_!")
                    .ok_or_else(|| self.error("unterminated text payload"))?;
                node.text = Some(body[..end].to_string());
                self.pos += 2 + end + 2;
            }
            other => return Err(self.error(format!("unknown attribute `{other}`"))),
        }
        self.expect(')')
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RstTree> {
        parse_dis("wsj_0001", text, &ReadOptions::default())
    }

    #[test]
    fn single_leaf() {
        let tree = parse("( Root (leaf 1) (text _!Hello there ._!) )").unwrap();
        assert_eq!(tree.n_edus(), 1);
        assert!(tree.root.is_leaf());
        assert_eq!(tree.genre, "news");
    }

    #[test]
    fn nucleus_satellite_pair() {
        let text = "( Root (span 1 2)
  ( Nucleus (leaf 1) (rel2par span) (text _!Mr. Vinken is chairman (of Elsevier)<s>_!) )
  ( Satellite (leaf 2) (rel2par elaboration-additional) (text _!which is Dutch .<P>_!) )
)";
        let tree = parse(text).unwrap();
        assert_eq!(tree.root.nuclearity(), "NS");
        assert_eq!(tree.root.children[1].relation, "elaboration-additional");
        assert_eq!(tree.edu_text(1), "Mr. Vinken is chairman (of Elsevier)");
        assert_eq!(tree.sentence_of(2), 2);
    }

    #[test]
    fn multinuclear_triple() {
        let text = "( Root (span 1 3)
 ( Nucleus (leaf 1) (rel2par List) (text _!a_!) )
 ( Nucleus (leaf 2) (rel2par List) (text _!b_!) )
 ( Nucleus (leaf 3) (rel2par List) (text _!c_!) ) )";
        let tree = parse(text).unwrap();
        assert_eq!(tree.root.nuclearity(), "NNN");
        assert_eq!(tree.root.relation(), Some("List"));
    }

    #[test]
    fn errors() {
        let unbalanced = "( Root (span 1 2) ( Nucleus (leaf 1) (rel2par span) (text _!a_!) )";
        assert!(parse(unbalanced).unwrap_err().to_string().contains("unbalanced"));
        let no_text = "( Root (span 1 2) ( Nucleus (leaf 1) (rel2par span) ) ( Satellite (leaf 2) (rel2par x) (text _!b_!) ) )";
        assert!(parse(no_text).unwrap_err().to_string().contains("without text"));
        let bad_span = "( Root (span 1 3) ( Nucleus (leaf 1) (rel2par span) (text _!a_!) ) ( Satellite (leaf 2) (rel2par x) (text _!b_!) ) )";
        assert!(parse(bad_span).unwrap_err().to_string().contains("declared span"));
        let bad_leaf = "( Root (span 1 2) ( Nucleus (leaf 2) (rel2par span) (text _!a_!) ) ( Satellite (leaf 1) (rel2par x) (text _!b_!) ) )";
        assert!(parse(bad_leaf).unwrap_err().to_string().contains("out of order"));
    }
}
