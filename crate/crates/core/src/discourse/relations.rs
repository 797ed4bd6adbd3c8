//! Relation label to relation class mapping tables.
//!
//! Tables are plain UTF-8 text, one `label<TAB>class` pair per line, with `#`
//! comments. Two directives may appear in comment lines:
//!
//! ```text
//! #! fallback = hyphen-prefix
//! #! normalize = rstdt
//! ```
//!
//! `hyphen-prefix` maps an unlisted label such as `adversative-contrast` to the
//! capitalized text before its first hyphen (`Adversative`). `rstdt` folds the
//! RST-DT nuclearity suffixes (`-s`, `-n`, `-e`) and case before lookup.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};

/// Reserved label and class of the document root.
pub const ROOT: &str = "ROOT";

/// Reserved label carried by nucleus children of mononuclear nodes.
pub const SPAN: &str = "span";

const GUM_TABLE: &str = include_str!("../../resources/gum_relations.tsv");
const RSTDT_TABLE: &str = include_str!("../../resources/rstdt_relations.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    None,
    HyphenPrefix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Lowercase,
    RstDt,
}

/// A corpus-specific label → class table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationScheme {
    name: String,
    table: BTreeMap<String, String>,
    fallback: Fallback,
    normalization: Normalization,
}

impl RelationScheme {
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut table = BTreeMap::new();
        let mut fallback = Fallback::None;
        let mut normalization = Normalization::Lowercase;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            let location = || Some(format!("{name}:{}", lineno + 1));
            if let Some(directive) = line.strip_prefix("#!") {
                let (key, value) = directive
                    .split_once('=')
                    .ok_or_else(|| Error::parse("relation table", location(), "directive without `=`"))?;
                match (key.trim(), value.trim()) {
                    ("fallback", "hyphen-prefix") => fallback = Fallback::HyphenPrefix,
                    ("fallback", "none") => fallback = Fallback::None,
                    ("normalize", "rstdt") => normalization = Normalization::RstDt,
                    ("normalize", "lowercase") => normalization = Normalization::Lowercase,
                    (k, v) => {
                        return Err(Error::parse(
                            "relation table",
                            location(),
                            format!("unknown directive {k} = {v}"),
                        ))
                    }
                }
                continue;
            }
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (label, class) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse("relation table", location(), "expected label<TAB>class"))?;
            let label = label.trim();
            let class = class.trim();
            if label.is_empty() || class.is_empty() {
                return Err(Error::parse("relation table", location(), "empty label or class"));
            }
            let key = normalize(label, normalization);
            if let Some(prev) = table.insert(key.clone(), class.to_string()) {
                if prev != class {
                    return Err(Error::parse(
                        "relation table",
                        location(),
                        format!("label {key} mapped to both {prev} and {class}"),
                    ));
                }
            }
        }
        Ok(RelationScheme {
            name: name.to_string(),
            table,
            fallback,
            normalization,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scheme".to_string());
        Self::parse(&name, &text)
    }

    /// The shipped GUM v9 table (32 labels, 15 classes).
    pub fn gum() -> Self {
        Self::parse("gum", GUM_TABLE).expect("bundled GUM table is well-formed")
    }

    /// The shipped RST-DT table.
    pub fn rst_dt() -> Self {
        Self::parse("rstdt", RSTDT_TABLE).expect("bundled RST-DT table is well-formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn fallback(&self) -> Fallback {
        self.fallback
    }

    /// Map a fine-grained label to its class.
    pub fn class_of(&self, label: &str) -> Result<String> {
        let trimmed = label.trim();
        if trimmed.eq_ignore_ascii_case(ROOT) {
            return Ok(ROOT.to_string());
        }
        let key = normalize(trimmed, self.normalization);
        if let Some(class) = self.table.get(&key) {
            return Ok(class.clone());
        }
        match self.fallback {
            Fallback::HyphenPrefix => {
                let prefix = key.split('-').next().unwrap_or_default();
                if prefix.is_empty() {
                    return Err(Error::UnknownLabel(label.to_string()));
                }
                let mut chars = prefix.chars();
                let first = chars.next().map(|c| c.to_uppercase().collect::<String>()).unwrap_or_default();
                Ok(first + chars.as_str())
            }
            Fallback::None => Err(Error::UnknownLabel(label.to_string())),
        }
    }

    /// Labels listed in the table (normalized form).
    pub fn labels(&self) -> BTreeSet<&str> {
        self.table.keys().map(String::as_str).collect()
    }

    /// Class inventory of the table, excluding ROOT.
    pub fn classes(&self) -> BTreeSet<&str> {
        self.table
            .values()
            .map(String::as_str)
            .filter(|c| *c != ROOT)
            .collect()
    }

    /// Check that every label in `labels` maps to a class.
    pub fn check_total<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for label in labels {
            if label == SPAN {
                continue;
            }
            self.class_of(label)?;
        }
        Ok(())
    }
}

fn normalize(label: &str, normalization: Normalization) -> String {
    let mut key = label.trim().to_lowercase();
    // rsd exports tag relations with their nuclearity type
    for suffix in ["_r", "_m"] {
        if let Some(stripped) = key.strip_suffix(suffix) {
            key = stripped.to_string();
        }
    }
    if normalization == Normalization::RstDt {
        for suffix in ["-s", "-n", "-e"] {
            if let Some(stripped) = key.strip_suffix(suffix) {
                key = stripped.to_string();
                break;
            }
        }
    }
    key
}
