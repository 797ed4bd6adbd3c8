//! Plain-text model format, one record per line, fields separated by tabs
//! (shown as spaces here):
//!
//! ```text
//! rstdiag-gbt  1
//! params  <n_rounds>  <max_depth>  <learning_rate>  <min_child_weight>  <l2_reg>  <subsample>  <seed>
//! base_score  <log-odds>
//! column  <name>  numeric|boolean|categorical  [<level>...]
//! train_loss  <loss>...
//! tree  <index>  <n_nodes>
//! split  <feature>  <threshold>  <left>  <right>  <gain>  <cover>
//! leaf  <value>  <cover>
//! ```
//!
//! `feature` indexes the one-hot expanded inputs in schema order. Floats are
//! written in shortest round-trip form, so reading a written model gives back
//! an identical one.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::features::{FeatureColumn, FeatureKind};

use super::model::{GbtModel, GbtParams};
use super::schema::FeatureSchema;
use super::tree::{Node, Tree};

const MAGIC: &str = "rstdiag-gbt";
const VERSION: u32 = 1;

fn kind_name(kind: FeatureKind) -> &'static str {
    match kind {
        FeatureKind::Numeric => "numeric",
        FeatureKind::Boolean => "boolean",
        FeatureKind::Categorical => "categorical",
    }
}

fn check_field(s: &str) -> Result<&str> {
    if s.is_empty() || s.contains(['\t', '\n', '\r']) {
        return Err(Error::Model(format!("name `{s}` cannot be stored in the text format")));
    }
    Ok(s)
}

pub fn write_model(model: &GbtModel) -> Result<String> {
    let p = &model.params;
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}\t{VERSION}");
    let _ = writeln!(
        out,
        "params\t{}\t{}\t{:?}\t{:?}\t{:?}\t{:?}\t{}",
        p.n_rounds, p.max_depth, p.learning_rate, p.min_child_weight, p.l2_reg, p.subsample, p.seed
    );
    let _ = writeln!(out, "base_score\t{:?}", model.base_score);
    for (c, levels) in model.schema.columns.iter().zip(&model.schema.levels) {
        let _ = write!(out, "column\t{}\t{}", check_field(&c.name)?, kind_name(c.kind));
        for l in levels {
            let _ = write!(out, "\t{}", check_field(l)?);
        }
        out.push('\n');
    }
    out.push_str("train_loss");
    for l in &model.train_loss {
        let _ = write!(out, "\t{l:?}");
    }
    out.push('\n');
    for (k, tree) in model.trees.iter().enumerate() {
        let _ = writeln!(out, "tree\t{k}\t{}", tree.nodes.len());
        for node in &tree.nodes {
            let _ = match node {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    gain,
                    cover,
                } => writeln!(out, "split\t{feature}\t{threshold:?}\t{left}\t{right}\t{gain:?}\t{cover:?}"),
                Node::Leaf { value, cover } => writeln!(out, "leaf\t{value:?}\t{cover:?}"),
            };
        }
    }
    Ok(out)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<Vec<&'a str>> {
        let (i, line) = self.inner.by_ref().find(|(_, l)| !l.starts_with('#'))?;
        self.line = i + 1;
        Some(line.trim_end_matches('\r').split('\t').collect())
    }

    fn err(&self, m: impl Into<String>) -> Error {
        Error::parse("model", Some(format!("line {}", self.line)), m)
    }

    fn expect(&mut self, tag: &str) -> Result<Vec<&'a str>> {
        match self.next() {
            Some(f) if f[0] == tag => Ok(f),
            Some(f) => Err(self.err(format!("expected `{tag}`, found `{}`", f[0]))),
            None => Err(self.err(format!("expected `{tag}`, found end of input"))),
        }
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad number `{s}`")))
    }
}

pub fn read_model(text: &str) -> Result<GbtModel> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let head = lines.expect(MAGIC)?;
    if head.get(1) != Some(&"1") {
        return Err(lines.err(format!("unsupported format version {:?}", head.get(1))));
    }
    let f = lines.expect("params")?;
    if f.len() != 8 {
        return Err(lines.err("params needs 7 values"));
    }
    let params = GbtParams {
        n_rounds: lines.num(f[1])?,
        max_depth: lines.num(f[2])?,
        learning_rate: lines.num(f[3])?,
        min_child_weight: lines.num(f[4])?,
        l2_reg: lines.num(f[5])?,
        subsample: lines.num(f[6])?,
        seed: lines.num(f[7])?,
    };
    let f = lines.expect("base_score")?;
    let base_score: f64 = lines.num(f.get(1).copied().unwrap_or_default())?;

    let mut columns = Vec::new();
    let mut levels = Vec::new();
    let mut train_loss = Vec::new();
    loop {
        let Some(f) = lines.next() else {
            return Err(lines.err("missing `train_loss`"));
        };
        match f[0] {
            "column" if f.len() >= 3 => {
                let kind = match f[2] {
                    "numeric" => FeatureKind::Numeric,
                    "boolean" => FeatureKind::Boolean,
                    "categorical" => FeatureKind::Categorical,
                    other => return Err(lines.err(format!("unknown column kind `{other}`"))),
                };
                columns.push(FeatureColumn {
                    name: f[1].to_string(),
                    kind,
                });
                levels.push(f[3..].iter().map(|s| s.to_string()).collect());
            }
            "train_loss" => {
                for v in &f[1..] {
                    train_loss.push(lines.num(v)?);
                }
                break;
            }
            other => return Err(lines.err(format!("unexpected record `{other}`"))),
        }
    }
    let schema = FeatureSchema { columns, levels };
    let n_inputs = schema.encoded().len();

    let mut trees = Vec::new();
    while let Some(f) = lines.next() {
        if f == [""] {
            continue;
        }
        if f[0] != "tree" || f.len() != 3 {
            return Err(lines.err("expected a `tree` record"));
        }
        let n_nodes: usize = lines.num(f[2])?;
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let f = lines.next().ok_or_else(|| lines.err("tree ends early"))?;
            let node = match (f[0], f.len()) {
                ("split", 7) => Node::Split {
                    feature: lines.num(f[1])?,
                    threshold: lines.num(f[2])?,
                    left: lines.num(f[3])?,
                    right: lines.num(f[4])?,
                    gain: lines.num(f[5])?,
                    cover: lines.num(f[6])?,
                },
                ("leaf", 3) => Node::Leaf {
                    value: lines.num(f[1])?,
                    cover: lines.num(f[2])?,
                },
                _ => return Err(lines.err("expected a `split` or `leaf` record")),
            };
            nodes.push(node);
        }
        for (i, node) in nodes.iter().enumerate() {
            if let Node::Split { feature, left, right, .. } = node {
                if *feature >= n_inputs || *left <= i || *right <= i || *left >= n_nodes || *right >= n_nodes {
                    return Err(lines.err(format!("tree {} node {i} has out-of-range references", trees.len())));
                }
            }
        }
        if nodes.is_empty() {
            return Err(lines.err("empty tree"));
        }
        trees.push(Tree { nodes });
    }
    Ok(GbtModel::assemble(params, schema, base_score, trees, train_loss))
}
