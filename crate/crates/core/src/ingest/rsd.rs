//! Tab-separated dependency export, one line per EDU:
//! `ID  TEXT  CLASS  _  _  _  HEAD  RELATION  _  _`, after a
//! `# doc_id = ...` comment line.

use std::fmt::Write as _;
use std::path::Path;

use crate::discourse::{DepGraph, DepNode, RelationScheme};
use crate::error::{Error, Result};

use super::doc_id_from_path;

const COLUMNS: usize = 10;

/// Read an rsd file. The document id comes from the `# doc_id` line, else
/// the file name.
pub fn read_rsd(path: &Path, scheme: Option<&RelationScheme>) -> Result<DepGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rsd(&doc_id_from_path(path), &text, scheme)
}

/// Parse rsd text. A `_` class column is filled from `scheme` when given.
pub fn parse_rsd(default_doc_id: &str, text: &str, scheme: Option<&RelationScheme>) -> Result<DepGraph> {
    let mut doc_id = default_doc_id.to_string();
    let mut nodes = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let loc = || Some(format!("{default_doc_id}:{}", lineno + 1));
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "doc_id" {
                    doc_id = value.trim().to_string();
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != COLUMNS {
            return Err(Error::parse("rsd", loc(), format!("expected {COLUMNS} columns, found {}", cols.len())));
        }
        let number = |s: &str, what: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::parse("rsd", loc(), format!("bad {what} `{s}`")))
        };
        let relation = cols[7].to_string();
        let class = match (cols[2], scheme) {
            ("_", Some(scheme)) => scheme.class_of(&relation)?,
            (c, _) => c.to_string(),
        };
        nodes.push(DepNode {
            edu_id: number(cols[0], "EDU id")?,
            head: number(cols[6], "head")?,
            relation,
            class,
            text: cols[1].to_string(),
        });
    }
    DepGraph::new(&doc_id, nodes)
}

/// Serialize a graph; tabs and newlines inside EDU text become spaces.
pub fn write_rsd(graph: &DepGraph) -> String {
    let mut out = format!("# doc_id = {}\n", graph.doc_id());
    for node in graph.nodes() {
        let text: String = node
            .text
            .chars()
            .map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c })
            .collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t_\t_\t_\t{}\t{}\t_\t_",
            node.edu_id, text, node.class, node.head, node.relation
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_root() {
        let g = parse_rsd("d", "1\tHello .\tROOT\t_\t_\t_\t0\tROOT\t_\t_\n", None).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.root(), 1);
    }

    #[test]
    fn round_trip_and_doc_id() {
        let text = "# doc_id = GUM_x\n1\ta\tROOT\t_\t_\t_\t0\tROOT\t_\t_\n2\tb\tCausal\t_\t_\t_\t1\tcausal-cause\t_\t_\n";
        let g = parse_rsd("file", text, None).unwrap();
        assert_eq!(g.doc_id(), "GUM_x");
        assert_eq!(write_rsd(&g), text);
        assert_eq!(parse_rsd("other", &write_rsd(&g), None).unwrap(), g);
    }

    #[test]
    fn class_from_scheme() {
        let text = "1\ta\t_\t_\t_\t_\t0\tROOT\t_\t_\n2\tb\t_\t_\t_\t_\t1\telaboration_r\t_\t_\n";
        let g = parse_rsd("d", text, Some(&RelationScheme::gum())).unwrap();
        assert_eq!(g.node(2).unwrap().class, "Elaboration");
    }

    #[test]
    fn structural_errors() {
        let row = |id: usize, head: usize| format!("{id}\tx\tC\t_\t_\t_\t{head}\tr\t_\t_\n");
        let cyclic = row(1, 2) + &row(2, 1);
        assert!(parse_rsd("d", &cyclic, None).is_err());
        let out_of_range = row(1, 0) + &row(2, 5);
        assert!(parse_rsd("d", &out_of_range, None).is_err());
        let duplicate = row(1, 0) + &row(1, 0);
        assert!(parse_rsd("d", &duplicate, None).is_err());
        let two_roots = row(1, 0) + &row(2, 0);
        assert!(parse_rsd("d", &two_roots, None).is_err());
        assert!(parse_rsd("d", "1\tx\n", None).is_err());
    }
}
