use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Numeric,
    Boolean,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureColumn {
    pub name: String,
    pub kind: FeatureKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureValue {
    Num(f64),
    Bool(bool),
    Cat(String),
}

impl FeatureValue {
    /// Numeric view: booleans are 0/1, categories have none.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            FeatureValue::Num(x) => Some(*x),
            FeatureValue::Bool(b) => Some(f64::from(u8::from(*b))),
            FeatureValue::Cat(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            FeatureValue::Cat(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Num(x) => write!(f, "{x}"),
            FeatureValue::Bool(b) => write!(f, "{b}"),
            FeatureValue::Cat(s) => f.write_str(s),
        }
    }
}

/// Which feature set a model sees.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum FeatureMode {
    /// Features available to a live system.
    #[default]
    Realistic,
    /// Every gold-derived feature.
    Full,
}

const REALISTIC: &[(&str, FeatureKind)] = &[
    ("length_tokens", FeatureKind::Numeric),
    ("dm_present", FeatureKind::Boolean),
    ("syn_function", FeatureKind::Categorical),
    ("oov_rate", FeatureKind::Numeric),
    ("genre", FeatureKind::Categorical),
];

const GOLD_ONLY: &[(&str, FeatureKind)] = &[
    ("signal_dm", FeatureKind::Boolean),
    ("distractor_present", FeatureKind::Boolean),
    ("subord", FeatureKind::Boolean),
    ("gold_class", FeatureKind::Categorical),
    ("n_children", FeatureKind::Numeric),
    ("n_descendants", FeatureKind::Numeric),
    ("domain_size", FeatureKind::Numeric),
    ("inter_sentential", FeatureKind::Boolean),
    ("inter_paragraph", FeatureKind::Boolean),
];

const TARGET_COLUMNS: [&str; 5] = ["attach_errors", "label_errors", "scaled_attach", "scaled_label", "target_hard"];

impl FeatureMode {
    pub fn columns(self) -> Vec<FeatureColumn> {
        let gold: &[(&str, FeatureKind)] = match self {
            FeatureMode::Realistic => &[],
            FeatureMode::Full => GOLD_ONLY,
        };
        REALISTIC
            .iter()
            .chain(gold)
            .map(|&(name, kind)| FeatureColumn {
                name: name.to_string(),
                kind,
            })
            .collect()
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "realistic" => Ok(FeatureMode::Realistic),
            "full" => Ok(FeatureMode::Full),
            other => Err(Error::Config(format!("unknown feature mode `{other}`"))),
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureMode::Realistic => "realistic",
            FeatureMode::Full => "full",
        })
    }
}

fn known_kind(name: &str) -> Option<FeatureKind> {
    REALISTIC.iter().chain(GOLD_ONLY).find(|(n, _)| *n == name).map(|&(_, k)| k)
}

/// One EDU's projected features and error targets.
#[derive(Debug, Clone, PartialEq)]
pub struct DataRow {
    pub doc_id: String,
    pub edu_id: usize,
    pub values: Vec<FeatureValue>,
    pub attach_errors: usize,
    pub label_errors: usize,
    pub scaled_attach: f64,
    pub scaled_label: f64,
    pub target_hard: bool,
}

/// A feature table: named, typed columns over EDU rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<FeatureColumn>,
    pub rows: Vec<DataRow>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Mode whose column set this table carries, if any.
    pub fn mode(&self) -> Option<FeatureMode> {
        [FeatureMode::Realistic, FeatureMode::Full]
            .into_iter()
            .find(|m| m.columns() == self.columns)
    }

    /// Keep only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Dataset> {
        let idx = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| Error::SchemaMismatch(format!("no column `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            columns: idx.iter().map(|&i| self.columns[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| DataRow {
                    values: idx.iter().map(|&i| r.values[i].clone()).collect(),
                    ..r.clone()
                })
                .collect(),
        })
    }

    /// Write with header `doc_id,edu_id,<features>,attach_errors,label_errors,
    /// scaled_attach,scaled_label,target_hard`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| Error::Config(format!("csv write: {e}"));
        let header = ["doc_id", "edu_id"]
            .into_iter()
            .map(String::from)
            .chain(self.columns.iter().map(|c| c.name.clone()))
            .chain(TARGET_COLUMNS.iter().map(|s| s.to_string()));
        w.write_record(header).map_err(csv_err)?;
        for row in &self.rows {
            let record = [row.doc_id.clone(), row.edu_id.to_string()]
                .into_iter()
                .chain(row.values.iter().map(ToString::to_string))
                .chain([
                    row.attach_errors.to_string(),
                    row.label_errors.to_string(),
                    row.scaled_attach.to_string(),
                    row.scaled_label.to_string(),
                    row.target_hard.to_string(),
                ]);
            w.write_record(record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Config(format!("csv write: {e}")))?;
        Ok(())
    }

    /// Read a table written by [`Dataset::write_csv`]; `#` lines are comments.
    ///
    /// Known feature names keep their kind; other columns are numeric when
    /// every value parses as a number, else categorical.
    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let parse_err = |m: String| Error::parse("csv", None, m);
        let header: Vec<String> = r
            .headers()
            .map_err(|e| parse_err(e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        let n = header.len();
        if n < 7 || header[0] != "doc_id" || header[1] != "edu_id" || header[n - 5..] != TARGET_COLUMNS {
            return Err(Error::SchemaMismatch(format!("unexpected header {}", header.join(","))));
        }
        let names = &header[2..n - 5];
        let mut raw = Vec::new();
        for record in r.records() {
            let record = record.map_err(|e| parse_err(e.to_string()))?;
            if record.len() != n {
                return Err(parse_err(format!("row has {} fields, header {n}", record.len())));
            }
            raw.push(record);
        }
        let columns: Vec<FeatureColumn> = names
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let kind = known_kind(name).unwrap_or_else(|| {
                    if raw.iter().all(|rec| rec[j + 2].parse::<f64>().is_ok()) {
                        FeatureKind::Numeric
                    } else {
                        FeatureKind::Categorical
                    }
                });
                FeatureColumn {
                    name: name.clone(),
                    kind,
                }
            })
            .collect();
        let rows = raw
            .iter()
            .enumerate()
            .map(|(i, rec)| {
                let line = i + 2;
                let field_err = |what: &str, v: &str| parse_err(format!("row {line}: bad {what} `{v}`"));
                let num = |v: &str, what: &str| v.parse::<f64>().map_err(|_| field_err(what, v));
                let int = |v: &str, what: &str| v.parse::<usize>().map_err(|_| field_err(what, v));
                let boolean = |v: &str, what: &str| parse_bool(v).ok_or_else(|| field_err(what, v));
                let values = columns
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let v = &rec[j + 2];
                        Ok(match c.kind {
                            FeatureKind::Numeric => FeatureValue::Num(num(v, &c.name)?),
                            FeatureKind::Boolean => FeatureValue::Bool(boolean(v, &c.name)?),
                            FeatureKind::Categorical => FeatureValue::Cat(v.to_string()),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(DataRow {
                    doc_id: rec[0].to_string(),
                    edu_id: int(&rec[1], "edu_id")?,
                    values,
                    attach_errors: int(&rec[n - 5], "attach_errors")?,
                    label_errors: int(&rec[n - 4], "label_errors")?,
                    scaled_attach: num(&rec[n - 3], "scaled_attach")?,
                    scaled_label: num(&rec[n - 2], "scaled_label")?,
                    target_hard: boolean(&rec[n - 1], "target_hard")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset { columns, rows })
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.trim().to_lowercase().as_str() {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Dataset {
        Dataset {
            columns: FeatureMode::Realistic.columns(),
            rows: vec![DataRow {
                doc_id: "GUM_a".into(),
                edu_id: 3,
                values: vec![
                    FeatureValue::Num(7.0),
                    FeatureValue::Bool(true),
                    FeatureValue::Cat("acl:relcl".into()),
                    FeatureValue::Num(0.1 + 0.2),
                    FeatureValue::Cat("news, wiki".into()),
                ],
                attach_errors: 2,
                label_errors: 3,
                scaled_attach: 0.4,
                scaled_label: 0.6,
                target_hard: false,
            }],
        }
    }

    #[test]
    fn column_sets() {
        assert_eq!(FeatureMode::Realistic.columns().len(), 5);
        assert_eq!(FeatureMode::Full.columns().len(), 14);
    }

    #[test]
    fn csv_round_trip() {
        let t = table();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "doc_id,edu_id,length_tokens,dm_present,syn_function,oov_rate,genre,attach_errors,label_errors,scaled_attach,scaled_label,target_hard\n"
        ));
        let with_comment = format!("# generated\n{text}");
        let back = Dataset::read_csv(with_comment.as_bytes()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.mode(), Some(FeatureMode::Realistic));
    }

    #[test]
    fn select_and_bad_header() {
        let t = table().select(&["genre", "oov_rate"]).unwrap();
        assert_eq!(t.columns[0].name, "genre");
        assert_eq!(t.rows[0].values.len(), 2);
        assert!(table().select(&["nope"]).is_err());
        assert!(Dataset::read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
