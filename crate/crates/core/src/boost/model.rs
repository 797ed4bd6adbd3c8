use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::Dataset;

use super::schema::FeatureSchema;
use super::tree::{build_tree, Tree, TreeParams};

/// Boosting hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbtParams {
    pub n_rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_child_weight: f64,
    pub l2_reg: f64,
    pub subsample: f64,
    pub seed: u64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            n_rounds: 100,
            max_depth: 4,
            learning_rate: 0.1,
            min_child_weight: 1.0,
            l2_reg: 1.0,
            subsample: 1.0,
            seed: 0,
        }
    }
}

impl GbtParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("boosting parameters: {m}")));
        if self.n_rounds == 0 {
            return bad("n_rounds must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must be in (0, 1]");
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return bad("subsample must be in (0, 1]");
        }
        if self.min_child_weight.is_nan() || self.min_child_weight < 0.0 || self.l2_reg.is_nan() || self.l2_reg < 0.0 {
            return bad("min_child_weight and l2_reg must be non-negative");
        }
        Ok(())
    }
}

/// A boosted ensemble for the binary `target_hard` label.
#[derive(Debug, Clone, PartialEq)]
pub struct GbtModel {
    pub params: GbtParams,
    pub schema: FeatureSchema,
    /// Log-odds of the training base rate.
    pub base_score: f64,
    pub trees: Vec<Tree>,
    /// Mean training log loss before the first round and after each round.
    pub train_loss: Vec<f64>,
    /// Summed split gain per encoded feature.
    pub gain_importance: BTreeMap<String, f64>,
    pub total_gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub probability: f64,
    pub hard: bool,
}

/// A feature's share of the total split gain.
#[derive(Debug, Clone, PartialEq)]
pub struct Importance {
    pub feature: String,
    pub gain: f64,
    pub share: f64,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Mean log loss of margins `m` against labels `y`.
fn log_loss(m: &[f64], y: &[f64]) -> f64 {
    // ln(1 + e^m) − y·m, computed without overflow
    let softplus = |x: f64| x.max(0.0) + (-x.abs()).exp().ln_1p();
    m.iter().zip(y).map(|(&m, &y)| softplus(m) - y * m).sum::<f64>() / m.len() as f64
}

impl GbtModel {
    /// Rebuild the gain tables from the trees.
    pub(crate) fn assemble(
        params: GbtParams,
        schema: FeatureSchema,
        base_score: f64,
        trees: Vec<Tree>,
        train_loss: Vec<f64>,
    ) -> Self {
        let names: Vec<String> = schema.encoded().into_iter().map(|e| e.name).collect();
        let mut gain_importance = BTreeMap::new();
        let mut total_gain = 0.0;
        for (f, gain) in trees.iter().flat_map(Tree::splits) {
            *gain_importance.entry(names[f].clone()).or_insert(0.0) += gain;
            total_gain += gain;
        }
        GbtModel {
            params,
            schema,
            base_score,
            trees,
            train_loss,
            gain_importance,
            total_gain,
        }
    }

    /// The model made of the first `rounds` trees.
    pub fn truncated(&self, rounds: usize) -> GbtModel {
        let rounds = rounds.min(self.trees.len());
        GbtModel::assemble(
            self.params,
            self.schema.clone(),
            self.base_score,
            self.trees[..rounds].to_vec(),
            self.train_loss[..(rounds + 1).min(self.train_loss.len())].to_vec(),
        )
    }

    fn margins(&self, features: &[Vec<f64>], n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let sum: f64 = self.trees.iter().map(|t| t.predict(|f| features[f][i])).sum();
                self.base_score + self.params.learning_rate * sum
            })
            .collect()
    }

    /// Probability of `hard` per row, decided at 0.5.
    pub fn predict(&self, data: &Dataset) -> Result<Vec<Prediction>> {
        let features = self.schema.encode(data)?;
        Ok(self
            .margins(&features, data.rows.len())
            .into_iter()
            .map(|m| {
                let probability = sigmoid(m).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
                Prediction {
                    probability,
                    hard: probability >= 0.5,
                }
            })
            .collect())
    }

    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        let preds = self.predict(data)?;
        let correct = preds.iter().zip(&data.rows).filter(|(p, r)| p.hard == r.target_hard).count();
        Ok(correct as f64 / data.rows.len().max(1) as f64)
    }
}

/// Rows sorted by document, EDU, label and feature values, so that a fit
/// does not depend on the input row order.
fn canonical_order(data: &Dataset, features: &[Vec<f64>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..data.rows.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ra, rb) = (&data.rows[a], &data.rows[b]);
        ra.doc_id
            .cmp(&rb.doc_id)
            .then(ra.edu_id.cmp(&rb.edu_id))
            .then(ra.target_hard.cmp(&rb.target_hard))
            .then_with(|| {
                features
                    .iter()
                    .map(|col| col[a].total_cmp(&col[b]))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
    });
    idx
}

/// Fit a boosted ensemble with the binary logistic objective.
///
/// Each round grows one tree on gradients and hessians of the log loss with
/// leaf weights −G/(H + l2_reg). If a round would raise the training loss,
/// its tree is shrunk by halving until it does not.
pub fn fit(data: &Dataset, params: &GbtParams) -> Result<GbtModel> {
    params.validate()?;
    if data.rows.is_empty() {
        return Err(Error::Model("no training rows".into()));
    }
    let positives = data.rows.iter().filter(|r| r.target_hard).count();
    if positives == 0 || positives == data.rows.len() {
        return Err(Error::Model("training labels contain a single class".into()));
    }
    let schema = FeatureSchema::from_dataset(data);
    let raw = schema.encode(data)?;
    let order = canonical_order(data, &raw);
    let features: Vec<Vec<f64>> = raw.iter().map(|col| order.iter().map(|&i| col[i]).collect()).collect();
    let y: Vec<f64> = order
        .iter()
        .map(|&i| f64::from(u8::from(data.rows[i].target_hard)))
        .collect();
    let n = y.len();
    let sorted: Vec<Vec<usize>> = features
        .iter()
        .map(|col| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
            idx
        })
        .collect();

    let rate = positives as f64 / n as f64;
    let base_score = (rate / (1.0 - rate)).ln();
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_child_weight: params.min_child_weight,
        l2: params.l2_reg,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut margins = vec![base_score; n];
    let mut loss = log_loss(&margins, &y);
    let mut train_loss = vec![loss];
    let mut trees = Vec::with_capacity(params.n_rounds);
    let mut in_sample = vec![true; n];

    for round in 0..params.n_rounds {
        let mut grad = Vec::with_capacity(n);
        let mut hess = Vec::with_capacity(n);
        for (m, y) in margins.iter().zip(&y) {
            let p = sigmoid(*m);
            grad.push(p - y);
            hess.push((p * (1.0 - p)).max(1e-16));
        }
        if params.subsample < 1.0 {
            for s in in_sample.iter_mut() {
                *s = rng.gen::<f64>() < params.subsample;
            }
        }
        let mut tree = build_tree(&features, &sorted, &grad, &hess, &in_sample, tree_params);
        let mut accepted = None;
        for _ in 0..30 {
            let next: Vec<f64> = (0..n)
                .map(|i| margins[i] + params.learning_rate * tree.predict(|f| features[f][i]))
                .collect();
            let next_loss = log_loss(&next, &y);
            if next_loss <= loss {
                accepted = Some((next, next_loss));
                break;
            }
            tree.scale_leaves(0.5);
        }
        let Some((next, next_loss)) = accepted else {
            log::warn!("boosting stopped after {round} rounds: no tree step lowers the training loss");
            break;
        };
        margins = next;
        loss = next_loss;
        train_loss.push(loss);
        trees.push(tree);
    }
    Ok(GbtModel::assemble(*params, schema, base_score, trees, train_loss))
}

/// Sort gains descending, ties alphabetical, with shares of their total.
pub fn rank_gains(gains: &BTreeMap<String, f64>) -> Vec<Importance> {
    let total: f64 = gains.values().sum();
    let mut out: Vec<Importance> = gains
        .iter()
        .map(|(feature, &gain)| Importance {
            feature: feature.clone(),
            gain,
            share: if total > 0.0 { gain / total } else { 0.0 },
        })
        .collect();
    out.sort_by(|a, b| b.gain.total_cmp(&a.gain).then_with(|| a.feature.cmp(&b.feature)));
    out
}

/// Gains summed back onto input columns (one-hot levels onto their parent).
pub fn parent_gains(model: &GbtModel) -> BTreeMap<String, f64> {
    let encoded = model.schema.encoded();
    let mut gains = BTreeMap::new();
    for tree in &model.trees {
        for (f, gain) in tree.splits() {
            let parent = &model.schema.columns[encoded[f].parent].name;
            *gains.entry(parent.clone()).or_insert(0.0) += gain;
        }
    }
    gains
}

/// Ranked feature importances of a fitted model.
pub fn importance_report(model: &GbtModel) -> Vec<Importance> {
    rank_gains(&parent_gains(model))
}

/// Importance ranking as `feature,gain,share` CSV.
pub fn write_importance_csv<W: std::io::Write>(ranking: &[Importance], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::Model(format!("importance csv: {e}"));
    w.write_record(["feature", "gain", "share"]).map_err(err)?;
    for imp in ranking {
        w.write_record([imp.feature.clone(), format!("{}", imp.gain), format!("{:.6}", imp.share)])
            .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}
