//! rstWeb `rs3` XML.
//!
//! Satellites point at their nucleus node through `parent` with an `rst`
//! relation; `span` groups take their nucleus through a child with relname
//! `span`; `multinuc` groups collect children carrying a multinuclear relation.
//! Signals (`<signals><signal source=.. type=.. tokens=../></signals>`) are
//! read separately by [`parse_rs3_signals`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use roxmltree::{Document, Node};

use crate::discourse::{
    tokenize_segments, validate_tree, ChildLink, ConstituentNode, DepGraph, DmAnnotation, DmStatus, RelationLink,
    Role, RstTree, SPAN,
};
use crate::error::{Error, Result};

use super::{doc_id_from_path, ReadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RelType {
    Rst,
    Multinuc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeKind {
    Segment(usize),
    Span,
    Multinuc,
}

#[derive(Debug, Clone)]
struct Rs3Node {
    kind: NodeKind,
    parent: Option<String>,
    relname: Option<String>,
}

/// A raw `<signal>` record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rs3Signal {
    pub source: String,
    pub kind: String,
    pub subtype: String,
    pub tokens: Vec<usize>,
}

/// A parsed rs3 document: the tree plus signals and the node-id → head-EDU map
/// needed to resolve them.
#[derive(Debug, Clone)]
pub struct Rs3Document {
    pub tree: RstTree,
    pub signals: Vec<Rs3Signal>,
    node_heads: HashMap<String, usize>,
}

impl Rs3Document {
    /// Head EDU of the constituent rooted at an rs3 node id.
    pub fn head_of_node(&self, id: &str) -> Option<usize> {
        self.node_heads.get(id).copied()
    }
}

pub fn read_rs3(path: &Path, opts: &ReadOptions) -> Result<RstTree> {
    Ok(read_rs3_document(path, opts)?.tree)
}

pub fn read_rs3_document(path: &Path, opts: &ReadOptions) -> Result<Rs3Document> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rs3(&doc_id_from_path(path), &text, opts)
}

pub fn parse_rs3(doc_id: &str, text: &str, opts: &ReadOptions) -> Result<Rs3Document> {
    let err = |message: String| Error::parse("rs3", Some(doc_id.to_string()), message);
    let xml = Document::parse(text).map_err(|e| err(e.to_string()))?;
    let root = xml.root_element();
    if root.tag_name().name() != "rst" {
        return Err(err(format!("root element is <{}>, expected <rst>", root.tag_name().name())));
    }

    let mut relations: HashMap<String, Vec<RelType>> = HashMap::new();
    let header = child(root, "header");
    if let Some(rels) = header.and_then(|h| child(h, "relations")) {
        for rel in rels.children().filter(|n| n.has_tag_name("rel")) {
            let name = rel.attribute("name").ok_or_else(|| err("<rel> without name".into()))?;
            let ty = match rel.attribute("type") {
                Some("rst") => RelType::Rst,
                Some("multinuc") => RelType::Multinuc,
                other => return Err(err(format!("relation {name} has unknown type {other:?}"))),
            };
            relations.entry(name.to_string()).or_default().push(ty);
        }
    }
    if relations.is_empty() {
        return Err(err("missing relations header".into()));
    }

    let body = child(root, "body").ok_or_else(|| err("missing <body>".into()))?;
    let mut nodes: BTreeMap<String, Rs3Node> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut segments: Vec<String> = Vec::new();
    let mut signals = Vec::new();
    for node in body.descendants().filter(|n| n.is_element()) {
        match node.tag_name().name() {
            "segment" => {
                let id = attr(node, "id").ok_or_else(|| err("<segment> without id".into()))?;
                segments.push(node.text().unwrap_or_default().to_string());
                register(&mut nodes, &mut order, id, node, NodeKind::Segment(segments.len())).map_err(err)?;
            }
            "group" => {
                let id = attr(node, "id").ok_or_else(|| err("<group> without id".into()))?;
                let kind = match node.attribute("type") {
                    Some("span") => NodeKind::Span,
                    Some("multinuc") => NodeKind::Multinuc,
                    other => return Err(err(format!("group {id} has unknown type {other:?}"))),
                };
                register(&mut nodes, &mut order, id, node, kind).map_err(err)?;
            }
            "signal" => {
                let tokens = node
                    .attribute("tokens")
                    .unwrap_or_default()
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse::<usize>().map_err(|_| err(format!("bad signal token `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                signals.push(Rs3Signal {
                    source: node.attribute("source").unwrap_or_default().to_string(),
                    kind: node.attribute("type").unwrap_or_default().to_string(),
                    subtype: node.attribute("subtype").unwrap_or_default().to_string(),
                    tokens,
                });
            }
            _ => {}
        }
    }
    if segments.is_empty() {
        return Err(err("document has no segments".into()));
    }

    // classify every edge and index children by parent
    let mut span_children: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut multi_children: HashMap<&str, Vec<(&str, &str)>> = HashMap::new();
    let mut satellites: HashMap<&str, Vec<(&str, &str)>> = HashMap::new();
    let mut roots = Vec::new();
    for id in &order {
        let node = &nodes[id];
        let Some(parent) = node.parent.as_deref() else {
            roots.push(id.as_str());
            continue;
        };
        let parent_node = nodes
            .get(parent)
            .ok_or_else(|| err(format!("node {id} references undeclared parent {parent}")))?;
        let relname = node.relname.as_deref().unwrap_or(SPAN);
        if relname == SPAN {
            span_children.entry(parent).or_default().push(id);
            continue;
        }
        let types = relations
            .get(relname)
            .ok_or_else(|| err(format!("relation `{relname}` of node {id} is not declared in the header")))?;
        let ty = if parent_node.kind == NodeKind::Multinuc && types.contains(&RelType::Multinuc) {
            RelType::Multinuc
        } else if types.contains(&RelType::Rst) {
            RelType::Rst
        } else {
            return Err(err(format!(
                "multinuclear relation `{relname}` of node {id} attaches to non-multinuclear node {parent}"
            )));
        };
        match ty {
            RelType::Multinuc => multi_children.entry(parent).or_default().push((id, relname)),
            RelType::Rst => satellites.entry(parent).or_default().push((id, relname)),
        }
    }
    let root_id = match roots.as_slice() {
        [one] => *one,
        [] => return Err(err("no root node".into())),
        many => return Err(err(format!("{} unattached root nodes: {}", many.len(), many.join(", ")))),
    };

    let builder = Builder {
        nodes: &nodes,
        span_children: &span_children,
        multi_children: &multi_children,
        satellites: &satellites,
    };
    let mut node_heads = HashMap::new();
    let mut visiting = HashSet::new();
    let (root_node, _) = builder
        .build(root_id, &mut node_heads, &mut visiting)
        .map_err(err)?;

    let segment_refs: Vec<&str> = segments.iter().map(String::as_str).collect();
    let seg = tokenize_segments(doc_id, &segment_refs, &opts.stoplist);
    let genre = opts.genre_for(doc_id);
    let mut tree = RstTree::new(doc_id, &genre, seg.edus, seg.tokens, root_node);
    tree.boundaries = seg.boundaries;
    tree.annotator = opts.annotator.clone();
    let report = validate_tree(&tree);
    if !report.is_valid() {
        return Err(err(format!("tree violates invariants: {report}")));
    }
    Ok(Rs3Document {
        tree,
        signals,
        node_heads,
    })
}

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children().find(|n| n.has_tag_name(name))
}

fn attr(node: Node, name: &str) -> Option<String> {
    node.attribute(name).map(|s| s.trim().to_string())
}

fn register(
    nodes: &mut BTreeMap<String, Rs3Node>,
    order: &mut Vec<String>,
    id: String,
    node: Node,
    kind: NodeKind,
) -> std::result::Result<(), String> {
    let info = Rs3Node {
        kind,
        parent: attr(node, "parent").filter(|p| !p.is_empty()),
        relname: attr(node, "relname").filter(|r| !r.is_empty()),
    };
    if nodes.insert(id.clone(), info).is_some() {
        return Err(format!("duplicate node id {id}"));
    }
    order.push(id);
    Ok(())
}

struct Builder<'a> {
    nodes: &'a BTreeMap<String, Rs3Node>,
    span_children: &'a HashMap<&'a str, Vec<&'a str>>,
    multi_children: &'a HashMap<&'a str, Vec<(&'a str, &'a str)>>,
    satellites: &'a HashMap<&'a str, Vec<(&'a str, &'a str)>>,
}

impl Builder<'_> {
    /// Constituent for an rs3 node and its head EDU.
    fn build(
        &self,
        id: &str,
        heads: &mut HashMap<String, usize>,
        visiting: &mut HashSet<String>,
    ) -> std::result::Result<(ConstituentNode, usize), String> {
        if !visiting.insert(id.to_string()) {
            return Err(format!("cycle through node {id}"));
        }
        let node = &self.nodes[id];
        let (core, head) = match node.kind {
            NodeKind::Segment(edu) => {
                if self.span_children.contains_key(id) || self.multi_children.contains_key(id) {
                    return Err(format!("segment {id} has span or multinuclear children"));
                }
                (ConstituentNode::leaf(edu), edu)
            }
            NodeKind::Span => {
                let kids = self.span_children.get(id).map(Vec::as_slice).unwrap_or_default();
                match kids {
                    [one] => self.build(one, heads, visiting)?,
                    [] => return Err(format!("span group {id} has no nucleus")),
                    _ => return Err(format!("span group {id} has {} span children", kids.len())),
                }
            }
            NodeKind::Multinuc => {
                let kids = self.multi_children.get(id).map(Vec::as_slice).unwrap_or_default();
                if kids.is_empty() {
                    return Err(format!("multinuclear group {id} has no nuclei"));
                }
                let mut built = Vec::with_capacity(kids.len());
                for (kid, rel) in kids {
                    let (n, h) = self.build(kid, heads, visiting)?;
                    built.push((n, h, *rel));
                }
                built.sort_by_key(|(n, _, _)| n.span.0);
                let head = built[0].1;
                if built.len() == 1 {
                    let (n, h, _) = built.pop().expect("one");
                    (n, h)
                } else {
                    let children = built
                        .into_iter()
                        .map(|(n, _, rel)| ChildLink {
                            node: n,
                            role: Role::Nucleus,
                            relation: rel.to_string(),
                        })
                        .collect();
                    (ConstituentNode::internal(children), head)
                }
            }
        };
        let sats = self.satellites.get(id).map(Vec::as_slice).unwrap_or_default();
        let result = if sats.is_empty() {
            core
        } else {
            let mut children = vec![ChildLink::nucleus(core)];
            for (sat, rel) in sats {
                let (n, _) = self.build(sat, heads, visiting)?;
                children.push(ChildLink::satellite(n, rel));
            }
            children.sort_by_key(|c| c.node.span.0);
            ConstituentNode::internal(children)
        };
        heads.insert(id.to_string(), head);
        visiting.remove(id);
        Ok((result, head))
    }
}

/// Discourse-marker signals embedded in an rs3 document.
///
/// `dm` signals link to the relation whose dependent is the head EDU of the
/// signal's source node; `orphan` signals with subtype `dm` are distractors.
/// Other signal types are ignored.
pub fn parse_rs3_signals(doc: &Rs3Document, gold: &DepGraph) -> Result<Vec<DmAnnotation>> {
    let doc_id = &doc.tree.doc_id;
    let fail = |message: String| Error::Annotation {
        doc_id: doc_id.clone(),
        message,
    };
    let mut out = Vec::new();
    for signal in &doc.signals {
        let kind = signal.kind.to_lowercase();
        let subtype = signal.subtype.to_lowercase();
        let status = match (kind.as_str(), subtype.as_str()) {
            ("dm", _) => DmStatus::Signal,
            ("orphan", "dm") => DmStatus::Distractor,
            _ => continue,
        };
        let mut tokens = signal.tokens.clone();
        tokens.sort_unstable();
        tokens.dedup();
        let edu = super::dm::containing_edu(&doc.tree, &tokens).map_err(fail)?;
        let dm_form = tokens
            .iter()
            .map(|&t| doc.tree.tokens[t - 1].form.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        let link = match status {
            DmStatus::Signal => {
                let dependent = doc
                    .head_of_node(&signal.source)
                    .ok_or_else(|| fail(format!("signal source {} is not a node", signal.source)))?;
                let node = gold
                    .node(dependent)
                    .filter(|n| n.head != 0)
                    .ok_or_else(|| fail(format!("signal source {} carries no relation", signal.source)))?;
                Some(RelationLink {
                    source_edu: dependent,
                    target_edu: node.head,
                    relation: node.relation.clone(),
                })
            }
            DmStatus::Distractor => None,
        };
        out.push(DmAnnotation {
            doc_id: doc_id.clone(),
            token_indices: tokens,
            dm_form,
            status,
            link,
            edu,
        });
    }
    Ok(out)
}
