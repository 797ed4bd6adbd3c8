use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureKind};

use super::betareg::{beta_fit, lrt, BetaOptions, Response};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PMethod {
    Wald,
    /// Likelihood ratio against the fit without the term.
    Lrt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermPValue {
    pub term: String,
    pub p_value: f64,
    pub method: PMethod,
}

/// One p-value per formula term: Wald for single-column terms, a
/// likelihood-ratio test for categorical ones.
pub fn term_p_values(data: &Dataset, terms: &[&str], response: Response, opts: &BetaOptions) -> Result<Vec<TermPValue>> {
    let full = beta_fit(data, terms, response, opts)?;
    let mut out = Vec::with_capacity(terms.len());
    for term in terms {
        let column = data
            .column_index(term)
            .ok_or_else(|| Error::SchemaMismatch(format!("formula term `{term}` is not a column")))?;
        if data.columns[column].kind == FeatureKind::Categorical {
            let reduced_terms: Vec<&str> = terms.iter().copied().filter(|t| t != term).collect();
            let reduced = beta_fit(data, &reduced_terms, response, opts)?;
            out.push(TermPValue {
                term: term.to_string(),
                p_value: lrt(&full, &reduced)?.p_value,
                method: PMethod::Lrt,
            });
        } else {
            let i = full
                .coef_names
                .iter()
                .position(|n| n == term)
                .ok_or_else(|| Error::MissingKey(format!("no coefficient for `{term}`")))?;
            out.push(TermPValue {
                term: term.to_string(),
                p_value: full.p_values[i],
                method: PMethod::Wald,
            });
        }
    }
    Ok(out)
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// Features by model columns, each cell a p-value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PValueGrid {
    pub columns: Vec<String>,
    cells: BTreeMap<(String, usize), f64>,
    features: Vec<String>,
}

impl PValueGrid {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a model column such as `gum/bottom_up/full`.
    pub fn add_column(&mut self, name: &str, values: &[TermPValue]) {
        let col = self.columns.len();
        self.columns.push(name.to_string());
        for v in values {
            if !self.features.contains(&v.term) {
                self.features.push(v.term.clone());
            }
            self.cells.insert((v.term.clone(), col), v.p_value);
        }
    }

    pub fn get(&self, feature: &str, column: &str) -> Option<f64> {
        let col = self.columns.iter().position(|c| c == column)?;
        self.cells.get(&(feature.to_string(), col)).copied()
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    /// CSV with `0.003**`-style cells; absent terms are empty. The first line
    /// marks the values as coming from the penalized approximation.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(
            writer,
            "# approximation: document effects are ridge-penalized intercepts, not a marginal-likelihood mixed model"
        )
        .map_err(|e| Error::io("<csv>", e))?;
        let mut csv = csv::Writer::from_writer(writer);
        let mut header = vec!["feature".to_string()];
        header.extend(self.columns.iter().cloned());
        csv.write_record(&header).map_err(csv_err)?;
        for f in &self.features {
            let mut record = vec![f.clone()];
            for col in 0..self.columns.len() {
                record.push(match self.cells.get(&(f.clone(), col)) {
                    Some(p) => format!("{p:.3}{}", stars(*p)),
                    None => String::new(),
                });
            }
            csv.write_record(&record).map_err(csv_err)?;
        }
        csv.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::parse("csv", None, e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(0.0005), "***");
        assert_eq!(stars(0.003), "**");
        assert_eq!(stars(0.04), "*");
        assert_eq!(stars(0.115), "");
    }

    #[test]
    fn wald_and_lrt_terms() {
        let data = crate::analysis::betareg::tests::genre_data(1200, 1.5, 8);
        let ps = term_p_values(&data, &["x", "genre"], Response::ScaledAttach, &BetaOptions::default()).unwrap();
        assert_eq!(ps[0].method, PMethod::Wald);
        assert_eq!(ps[1].method, PMethod::Lrt);
        assert!(ps.iter().all(|p| p.p_value < 0.01), "{ps:?}");
    }

    #[test]
    fn grid_csv() {
        let mut grid = PValueGrid::new();
        let pv = |t: &str, p| TermPValue {
            term: t.into(),
            p_value: p,
            method: PMethod::Wald,
        };
        grid.add_column("gum/bu/full", &[pv("dm_present", 0.003), pv("oov_rate", 0.115)]);
        grid.add_column("gum/bu/realistic", &[pv("oov_rate", 0.0001)]);
        assert_eq!(grid.get("oov_rate", "gum/bu/realistic"), Some(0.0001));
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# approximation"));
        assert_eq!(lines[1], "feature,gum/bu/full,gum/bu/realistic");
        assert_eq!(lines[2], "dm_present,0.003**,");
        assert_eq!(lines[3], "oov_rate,0.115,0.000***");
    }
}
