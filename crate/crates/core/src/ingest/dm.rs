//! Token-anchored discourse-marker annotations.
//!
//! UTF-8 TSV with columns `doc_id, token_indices, dm_form, source_edu,
//! target_edu, relation_label`. Token indices are 1-based document positions,
//! comma-joined. `NONE` in the last three columns marks a distractor. An
//! optional header row starting with `doc_id` and `#` comment lines are skipped.

use std::collections::BTreeMap;
use std::path::Path;

use crate::discourse::{DepGraph, DmAnnotation, DmStatus, RelationLink, RstTree};
use crate::error::{Error, Result};

/// Gold layers of one document, used to anchor tokens and resolve links.
#[derive(Debug, Clone, Copy)]
pub struct GoldDoc<'a> {
    pub tree: &'a RstTree,
    pub deps: &'a DepGraph,
}

pub fn read_dm_annotations(path: &Path, gold: &BTreeMap<String, GoldDoc<'_>>) -> Result<Vec<DmAnnotation>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dm_annotations(&text, gold)
}

/// Parse annotation rows and resolve every signal to a gold relation instance.
///
/// A link may be given in either direction; it is stored dependent → head and
/// carries the gold fine label. The relation field may name the fine label or
/// its class.
pub fn parse_dm_annotations(text: &str, gold: &BTreeMap<String, GoldDoc<'_>>) -> Result<Vec<DmAnnotation>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with("doc_id")) {
            continue;
        }
        let loc = || Some(format!("line {}", lineno + 1));
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if cols.len() != 6 {
            return Err(Error::parse("dm", loc(), format!("expected 6 columns, found {}", cols.len())));
        }
        let doc_id = cols[0];
        let doc = gold.get(doc_id).ok_or_else(|| Error::MissingKey(format!("no gold document `{doc_id}`")))?;
        let fail = |message: String| Error::Annotation {
            doc_id: doc_id.to_string(),
            message: format!("line {}: {message}", lineno + 1),
        };
        let mut tokens = cols[1]
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::parse("dm", loc(), format!("bad token index `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        tokens.sort_unstable();
        tokens.dedup();
        let edu = containing_edu(doc.tree, &tokens).map_err(fail)?;

        let is_none = |s: &str| s.eq_ignore_ascii_case("none");
        let (status, link) = match (cols[3], cols[4], cols[5]) {
            (s, t, r) if is_none(s) && is_none(t) && is_none(r) => (DmStatus::Distractor, None),
            (s, t, r) if is_none(s) || is_none(t) || is_none(r) => {
                return Err(fail("NONE must fill all three link columns".into()));
            }
            (s, t, r) => {
                let source: usize = s.parse().map_err(|_| fail(format!("bad source EDU `{s}`")))?;
                let target: usize = t.parse().map_err(|_| fail(format!("bad target EDU `{t}`")))?;
                let link = resolve(doc.deps, source, target, r).ok_or_else(|| {
                    fail(format!("signal points at nonexistent relation ({source} -> {target}, {r})"))
                })?;
                (DmStatus::Signal, Some(link))
            }
        };
        out.push(DmAnnotation {
            doc_id: doc_id.to_string(),
            token_indices: tokens,
            dm_form: cols[2].to_string(),
            status,
            link,
            edu,
        });
    }
    Ok(out)
}

fn resolve(deps: &DepGraph, a: usize, b: usize, label: &str) -> Option<RelationLink> {
    let matches = |dependent: usize, head: usize| {
        let node = deps.relation_instance(dependent, head)?;
        let ok = node.relation.eq_ignore_ascii_case(label) || node.class.eq_ignore_ascii_case(label);
        ok.then(|| RelationLink {
            source_edu: dependent,
            target_edu: head,
            relation: node.relation.clone(),
        })
    };
    matches(a, b).or_else(|| matches(b, a))
}

/// The single EDU holding every token of a marker.
pub(crate) fn containing_edu(tree: &RstTree, tokens: &[usize]) -> std::result::Result<usize, String> {
    let n = tree.tokens.len();
    if tokens.is_empty() {
        return Err("marker without tokens".into());
    }
    if let Some(bad) = tokens.iter().find(|&&t| t == 0 || t > n) {
        return Err(format!("token index {bad} outside document of {n} tokens"));
    }
    let edu = tree.edu_of_token(tokens[0]).ok_or("token not inside any EDU")?;
    if tokens.iter().any(|&t| tree.edu_of_token(t) != Some(edu)) {
        return Err(format!("marker tokens {tokens:?} span several EDUs"));
    }
    Ok(edu)
}
