use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureKind};

/// How one formula term expands into design columns.
#[derive(Debug, Clone, PartialEq)]
pub enum TermCoding {
    Numeric { column: usize },
    /// Treatment coding against the alphabetically first level.
    Dummy { column: usize, reference: String, levels: Vec<String> },
}

/// A model matrix with an intercept column first.
#[derive(Debug, Clone)]
pub struct Design {
    pub matrix: DMatrix<f64>,
    /// Column names, `(Intercept)` first; dummies are `term=level`.
    pub names: Vec<String>,
    pub terms: Vec<String>,
    pub coding: Vec<TermCoding>,
}

impl Design {
    pub fn build(data: &Dataset, terms: &[&str]) -> Result<Design> {
        let mut coding = Vec::with_capacity(terms.len());
        for term in terms {
            let column = data
                .column_index(term)
                .ok_or_else(|| Error::SchemaMismatch(format!("formula term `{term}` is not a column")))?;
            match data.columns[column].kind {
                FeatureKind::Numeric | FeatureKind::Boolean => coding.push(TermCoding::Numeric { column }),
                FeatureKind::Categorical => {
                    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                    for row in &data.rows {
                        *counts.entry(row.values[column].as_str().unwrap_or_default()).or_default() += 1;
                    }
                    let mut levels = counts.keys().map(|s| s.to_string());
                    let reference = levels.next().unwrap_or_default();
                    coding.push(TermCoding::Dummy {
                        column,
                        reference,
                        levels: levels.collect(),
                    });
                }
            }
        }
        let terms: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
        let mut names = vec!["(Intercept)".to_string()];
        for (term, c) in terms.iter().zip(&coding) {
            match c {
                TermCoding::Numeric { .. } => names.push(term.clone()),
                TermCoding::Dummy { levels, .. } => names.extend(levels.iter().map(|l| format!("{term}={l}"))),
            }
        }
        let mut design = Design {
            matrix: DMatrix::zeros(0, 0),
            names,
            terms,
            coding,
        };
        design.matrix = design.apply(data)?;
        Ok(design)
    }

    /// Encode rows of `data` with this design's coding (unseen levels get all
    /// zero dummies).
    pub fn apply(&self, data: &Dataset) -> Result<DMatrix<f64>> {
        let p = self.names.len();
        let mut m = DMatrix::zeros(data.rows.len(), p);
        for (i, row) in data.rows.iter().enumerate() {
            m[(i, 0)] = 1.0;
            let mut j = 1;
            for c in &self.coding {
                match c {
                    TermCoding::Numeric { column } => {
                        m[(i, j)] = row.values[*column].as_f64().ok_or_else(|| {
                            Error::SchemaMismatch(format!("non-numeric value in column {column}"))
                        })?;
                        j += 1;
                    }
                    TermCoding::Dummy { column, levels, .. } => {
                        let v = row.values[*column].as_str().unwrap_or_default();
                        if let Some(k) = levels.iter().position(|l| l == v) {
                            m[(i, j + k)] = 1.0;
                        }
                        j += levels.len();
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn n_columns(&self) -> usize {
        self.names.len()
    }

    /// Fail when the columns are linearly dependent.
    pub fn check_rank(&self) -> Result<()> {
        let p = self.n_columns();
        if self.matrix.nrows() < p {
            return Err(Error::RankDeficient(format!("{} rows for {p} columns", self.matrix.nrows())));
        }
        // scale columns so the rank tolerance is unit-free
        let mut scaled = self.matrix.clone();
        for mut col in scaled.column_iter_mut() {
            let norm = col.norm();
            if norm > 0.0 {
                col /= norm;
            }
        }
        let sv = scaled.singular_values();
        let max = sv.max();
        let rank = sv.iter().filter(|&&s| s > max * 1e-10).count();
        if rank < p {
            return Err(Error::RankDeficient(format!(
                "design of rank {rank} has {p} columns ({})",
                self.names.join(", ")
            )));
        }
        Ok(())
    }
}
