use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::features::Dataset;

use super::design::Design;

/// Main-effects logistic regression, a linear baseline for the boosted model.
#[derive(Debug, Clone)]
pub struct LogisticModel {
    pub design: Design,
    pub coefficients: Vec<f64>,
}

impl LogisticModel {
    /// Fit by iteratively reweighted least squares on the `target_hard` labels.
    /// A tiny ridge keeps separable data finite.
    pub fn fit(data: &Dataset, terms: &[&str]) -> Result<LogisticModel> {
        let design = Design::build(data, terms)?;
        let x = &design.matrix;
        let y: Vec<f64> = data.rows.iter().map(|r| f64::from(u8::from(r.target_hard))).collect();
        let p = x.ncols();
        let mut beta = DVector::zeros(p);
        for _ in 0..100 {
            let eta = x * &beta;
            let mu: Vec<f64> = eta.iter().map(|&e| 1.0 / (1.0 + (-e).exp())).collect();
            let w: Vec<f64> = mu.iter().map(|m| (m * (1.0 - m)).max(1e-10)).collect();
            let mut xtwx = DMatrix::<f64>::identity(p, p) * 1e-6;
            let mut grad = DVector::<f64>::zeros(p);
            for i in 0..x.nrows() {
                let row = x.row(i);
                for j in 0..p {
                    grad[j] += row[j] * (y[i] - mu[i]);
                    for k in 0..p {
                        xtwx[(j, k)] += w[i] * row[j] * row[k];
                    }
                }
            }
            grad -= &beta * 1e-6;
            let step = xtwx
                .cholesky()
                .map(|c| c.solve(&grad))
                .ok_or_else(|| Error::RankDeficient("logistic information matrix".into()))?;
            beta += &step;
            if step.amax() < 1e-10 {
                break;
            }
        }
        Ok(LogisticModel {
            coefficients: beta.iter().copied().collect(),
            design,
        })
    }

    pub fn predict_proba(&self, data: &Dataset) -> Result<Vec<f64>> {
        let x = self.design.apply(data)?;
        let beta = DVector::from_column_slice(&self.coefficients);
        Ok((x * beta).iter().map(|&e| 1.0 / (1.0 + (-e).exp())).collect())
    }

    /// Share of rows whose thresholded prediction matches `target_hard`.
    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        let probs = self.predict_proba(data)?;
        let hits = probs
            .iter()
            .zip(&data.rows)
            .filter(|(p, r)| (**p >= 0.5) == r.target_hard)
            .count();
        Ok(hits as f64 / data.rows.len().max(1) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{DataRow, FeatureColumn, FeatureKind, FeatureValue};

    #[test]
    fn learns_a_linear_boundary() {
        let rows = (0..200)
            .map(|i| {
                let x = i as f64 / 20.0 - 5.0;
                DataRow {
                    doc_id: "d".into(),
                    edu_id: i + 1,
                    values: vec![FeatureValue::Num(x)],
                    attach_errors: 0,
                    label_errors: 0,
                    scaled_attach: 0.0,
                    scaled_label: 0.0,
                    target_hard: (x + 0.37 * (i % 7) as f64 - 1.0) > 0.0,
                }
            })
            .collect();
        let data = Dataset {
            columns: vec![FeatureColumn {
                name: "x".into(),
                kind: FeatureKind::Numeric,
            }],
            rows,
        };
        let model = LogisticModel::fit(&data, &["x"]).unwrap();
        assert!(model.coefficients[1] > 0.0);
        assert!(model.accuracy(&data).unwrap() > 0.85);
    }
}
