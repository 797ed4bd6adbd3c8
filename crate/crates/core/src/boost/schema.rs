use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureColumn, FeatureKind, FeatureValue};

/// Label of the one-hot column that catches categories unseen in training.
pub const UNSEEN: &str = "<unseen>";

/// Input columns and their one-hot expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    pub columns: Vec<FeatureColumn>,
    /// Training levels per column, sorted; empty for non-categorical columns.
    pub levels: Vec<Vec<String>>,
}

/// One expanded model input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub name: String,
    /// Index of the input column it came from.
    pub parent: usize,
}

impl FeatureSchema {
    pub fn from_dataset(data: &Dataset) -> Self {
        let levels = data
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if c.kind != FeatureKind::Categorical {
                    return Vec::new();
                }
                let mut seen: Vec<String> = data
                    .rows
                    .iter()
                    .filter_map(|r| r.values[j].as_str().map(String::from))
                    .collect();
                seen.sort();
                seen.dedup();
                seen
            })
            .collect();
        FeatureSchema {
            columns: data.columns.clone(),
            levels,
        }
    }

    /// Expanded inputs: numeric and boolean columns as themselves,
    /// categoricals as `name=level` per training level plus `name=<unseen>`.
    pub fn encoded(&self) -> Vec<Encoded> {
        let mut out = Vec::new();
        for (j, c) in self.columns.iter().enumerate() {
            match c.kind {
                FeatureKind::Numeric | FeatureKind::Boolean => out.push(Encoded {
                    name: c.name.clone(),
                    parent: j,
                }),
                FeatureKind::Categorical => {
                    for level in self.levels[j].iter().map(String::as_str).chain([UNSEEN]) {
                        out.push(Encoded {
                            name: format!("{}={level}", c.name),
                            parent: j,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn check(&self, data: &Dataset) -> Result<()> {
        if data.columns != self.columns {
            let names = |cs: &[FeatureColumn]| cs.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(",");
            return Err(Error::SchemaMismatch(format!(
                "model expects columns [{}], data has [{}]",
                names(&self.columns),
                names(&data.columns)
            )));
        }
        Ok(())
    }

    /// Column-major encoded matrix: `out[feature][row]`.
    pub fn encode(&self, data: &Dataset) -> Result<Vec<Vec<f64>>> {
        self.check(data)?;
        let n = data.rows.len();
        let mut out = Vec::new();
        for (j, c) in self.columns.iter().enumerate() {
            match c.kind {
                FeatureKind::Numeric | FeatureKind::Boolean => {
                    let col = data
                        .rows
                        .iter()
                        .map(|r| {
                            r.values[j].as_f64().ok_or_else(|| {
                                Error::SchemaMismatch(format!("non-numeric value in column `{}`", c.name))
                            })
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    out.push(col);
                }
                FeatureKind::Categorical => {
                    let levels = &self.levels[j];
                    let base = out.len();
                    out.extend((0..=levels.len()).map(|_| vec![0.0; n]));
                    for (i, r) in data.rows.iter().enumerate() {
                        let FeatureValue::Cat(v) = &r.values[j] else {
                            return Err(Error::SchemaMismatch(format!("non-categorical value in column `{}`", c.name)));
                        };
                        let k = levels.binary_search(v).unwrap_or(levels.len());
                        out[base + k][i] = 1.0;
                    }
                }
            }
        }
        Ok(out)
    }
}
