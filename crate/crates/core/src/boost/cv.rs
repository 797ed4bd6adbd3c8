use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::Dataset;

use super::model::{fit, parent_gains, rank_gains, GbtParams, Importance};

/// Description of the evaluation protocol, carried into reports.
pub const CV_PROTOCOL: &str = "document-grouped k-fold cross-validation";

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub k_folds: usize,
    pub protocol: &'static str,
    pub fold_accuracies: Vec<f64>,
    /// Mean of the fold accuracies.
    pub accuracy: f64,
    /// Accuracy of predicting each fold's training majority class.
    pub fold_baselines: Vec<f64>,
    pub baseline: f64,
    /// Gain per input column summed over the fold models.
    pub gains: BTreeMap<String, f64>,
}

impl CvReport {
    pub fn importance(&self) -> Vec<Importance> {
        rank_gains(&self.gains)
    }
}

/// Fold index per row; documents are shuffled with `seed` and dealt to
/// folds in turn, so no document straddles two folds.
pub fn document_folds(data: &Dataset, k_folds: usize, seed: u64) -> Result<Vec<usize>> {
    if k_folds < 2 {
        return Err(Error::Config("cross-validation needs at least 2 folds".into()));
    }
    let docs: BTreeSet<&str> = data.rows.iter().map(|r| r.doc_id.as_str()).collect();
    if docs.len() < k_folds {
        return Err(Error::Config(format!("{} documents cannot fill {k_folds} folds", docs.len())));
    }
    let mut docs: Vec<&str> = docs.into_iter().collect();
    docs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let fold_of: BTreeMap<&str, usize> = docs.iter().enumerate().map(|(i, d)| (*d, i % k_folds)).collect();
    Ok(data.rows.iter().map(|r| fold_of[r.doc_id.as_str()]).collect())
}

fn subset(data: &Dataset, keep: impl Fn(usize) -> bool) -> Dataset {
    Dataset {
        columns: data.columns.clone(),
        rows: data
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, r)| r.clone())
            .collect(),
    }
}

/// Document-grouped cross-validation of the boosted model. Folds are fitted
/// in parallel; results are gathered in fold order.
pub fn cross_validate(data: &Dataset, params: &GbtParams, k_folds: usize) -> Result<CvReport> {
    let folds = document_folds(data, k_folds, params.seed)?;
    let results = (0..k_folds)
        .into_par_iter()
        .map(|k| {
            let train = subset(data, |i| folds[i] != k);
            let test = subset(data, |i| folds[i] == k);
            let model = fit(&train, params)?;
            let accuracy = model.accuracy(&test)?;
            let positives = train.rows.iter().filter(|r| r.target_hard).count();
            let majority = 2 * positives > train.rows.len();
            let baseline =
                test.rows.iter().filter(|r| r.target_hard == majority).count() as f64 / test.rows.len() as f64;
            Ok((accuracy, baseline, parent_gains(&model)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut gains = BTreeMap::new();
    for (_, _, g) in &results {
        for (name, v) in g {
            *gains.entry(name.clone()).or_insert(0.0) += v;
        }
    }
    let fold_accuracies: Vec<f64> = results.iter().map(|r| r.0).collect();
    let fold_baselines: Vec<f64> = results.iter().map(|r| r.1).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(CvReport {
        k_folds,
        protocol: CV_PROTOCOL,
        accuracy: mean(&fold_accuracies),
        baseline: mean(&fold_baselines),
        fold_accuracies,
        fold_baselines,
        gains,
    })
}
