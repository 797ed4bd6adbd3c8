use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::features::Dataset;

use super::design::Design;
use super::hypothesis::TestResult;
use super::special::trigamma;

/// Which scaled error count is modelled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Response {
    #[default]
    ScaledAttach,
    ScaledLabel,
}

impl FromStr for Response {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "scaled_attach" | "attach" => Ok(Response::ScaledAttach),
            "scaled_label" | "label" => Ok(Response::ScaledLabel),
            other => Err(Error::Config(format!("unknown response `{other}`"))),
        }
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Response::ScaledAttach => "scaled_attach",
            Response::ScaledLabel => "scaled_label",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaOptions {
    /// Fit ridge-penalized per-document intercepts.
    pub doc_effects: bool,
    /// Ridge weight on the document intercepts.
    pub penalty: f64,
    pub max_iter: usize,
    /// Convergence bound on the largest absolute score component.
    pub tolerance: f64,
    /// Required rows per fixed coefficient.
    pub min_rows_per_coef: usize,
}

impl Default for BetaOptions {
    fn default() -> Self {
        BetaOptions {
            doc_effects: true,
            penalty: 1.0,
            max_iter: 200,
            tolerance: 1e-8,
            min_rows_per_coef: 10,
        }
    }
}

/// A fitted beta regression with logit mean link and constant precision.
#[derive(Debug, Clone)]
pub struct BetaRegFit {
    pub response: Response,
    pub terms: Vec<String>,
    pub coef_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub z_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub precision: f64,
    pub doc_intercepts: BTreeMap<String, f64>,
    /// Beta log-likelihood of the squeezed responses at the optimum.
    pub log_likelihood: f64,
    /// Log-likelihood minus the ridge penalty; the optimized objective.
    pub penalized_log_likelihood: f64,
    /// Penalized log-likelihood after each accepted step, starting values first.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub n_obs: usize,
    pub options: BetaOptions,
    rows_key: u64,
}

impl BetaRegFit {
    /// Fixed parameters: mean coefficients plus the precision.
    pub fn n_params(&self) -> usize {
        self.coefficients.len() + 1
    }

    /// Coefficient and Wald p-value by column name.
    pub fn coefficient(&self, name: &str) -> Option<(f64, f64)> {
        let i = self.coef_names.iter().position(|n| n == name)?;
        Some((self.coefficients[i], self.p_values[i]))
    }
}

/// Squeeze responses into the open unit interval: y' = (y(n−1) + 0.5)/n.
pub fn squeeze(y: &[f64]) -> Vec<f64> {
    let n = y.len() as f64;
    y.iter().map(|&v| (v * (n - 1.0) + 0.5) / n).collect()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn rows_key(data: &Dataset, response: Response) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    for r in &data.rows {
        r.doc_id.hash(&mut h);
        r.edu_id.hash(&mut h);
        response_of(r, response).to_bits().hash(&mut h);
    }
    h.finish()
}

fn response_of(row: &crate::features::DataRow, response: Response) -> f64 {
    match response {
        Response::ScaledAttach => row.scaled_attach,
        Response::ScaledLabel => row.scaled_label,
    }
}

struct Problem {
    x: DMatrix<f64>,
    y: Vec<f64>,
    groups: Vec<usize>,
    n_groups: usize,
    lambda: f64,
}

struct Eval {
    pen_ll: f64,
    ll: f64,
    grad: DVector<f64>,
    /// Negative observed Hessian of the penalized objective.
    neg_hess: DMatrix<f64>,
    /// Negative expected Hessian.
    fisher: DMatrix<f64>,
}

impl Problem {
    fn dim(&self) -> usize {
        self.x.ncols() + self.n_groups + 1
    }

    fn eta(&self, theta: &DVector<f64>, i: usize) -> f64 {
        let p = self.x.ncols();
        let mut eta = 0.0;
        for j in 0..p {
            eta += self.x[(i, j)] * theta[j];
        }
        if self.n_groups > 0 {
            eta += theta[p + self.groups[i]];
        }
        eta
    }

    fn penalty(&self, theta: &DVector<f64>) -> f64 {
        let p = self.x.ncols();
        (0..self.n_groups).map(|g| theta[p + g].powi(2)).sum::<f64>() * self.lambda / 2.0
    }

    fn log_lik(&self, theta: &DVector<f64>) -> f64 {
        let phi = theta[self.dim() - 1].exp();
        let lg_phi = ln_gamma(phi);
        (0..self.y.len())
            .map(|i| {
                let mu = sigmoid(self.eta(theta, i));
                let (a, b) = (mu * phi, (1.0 - mu) * phi);
                let y = self.y[i];
                lg_phi - ln_gamma(a) - ln_gamma(b) + (a - 1.0) * y.ln() + (b - 1.0) * (1.0 - y).ln()
            })
            .sum()
    }

    fn evaluate(&self, theta: &DVector<f64>) -> Eval {
        let p = self.x.ncols();
        let d = self.dim();
        let gi = d - 1;
        let phi = theta[gi].exp();
        let (psi_phi, tri_phi) = (digamma(phi), trigamma(phi));
        let mut grad = DVector::zeros(d);
        let mut obs = DMatrix::zeros(d, d);
        let mut fis = DMatrix::zeros(d, d);
        let mut ll = 0.0;

        for i in 0..self.y.len() {
            let mu = sigmoid(self.eta(theta, i));
            let m = mu * (1.0 - mu);
            let (a, b) = (mu * phi, (1.0 - mu) * phi);
            let (psi_a, psi_b) = (digamma(a), digamma(b));
            let (tri_a, tri_b) = (trigamma(a), trigamma(b));
            let y = self.y[i];
            let (ly, l1y) = (y.ln(), (1.0 - y).ln());
            let t = ly - l1y;
            ll += ln_gamma(phi) - ln_gamma(a) - ln_gamma(b) + (a - 1.0) * ly + (b - 1.0) * l1y;

            let s_mu = phi * (t - psi_a + psi_b);
            let s_phi = psi_phi - mu * psi_a - (1.0 - mu) * psi_b + mu * ly + (1.0 - mu) * l1y;
            let g_eta = s_mu * m;
            let g_gamma = s_phi * phi;

            // second derivatives of the log-likelihood
            let e_mumu = -phi * phi * (tri_a + tri_b);
            let e_phiphi = tri_phi - mu * mu * tri_a - (1.0 - mu) * (1.0 - mu) * tri_b;
            let cross = -phi * (mu * tri_a - (1.0 - mu) * tri_b);
            let h_eta = e_mumu * m * m + s_mu * m * (1.0 - 2.0 * mu);
            let h_gamma = e_phiphi * phi * phi + s_phi * phi;
            let h_eg = ((t - psi_a + psi_b) + cross) * m * phi;
            let f_eta = e_mumu * m * m;
            let f_gamma = e_phiphi * phi * phi;
            let f_eg = cross * m * phi;

            // indices touched by observation i: fixed columns, its group, γ
            let mut idx: Vec<(usize, f64)> = (0..p).map(|j| (j, self.x[(i, j)])).collect();
            if self.n_groups > 0 {
                idx.push((p + self.groups[i], 1.0));
            }
            for &(j, xj) in &idx {
                grad[j] += g_eta * xj;
                for &(k, xk) in &idx {
                    obs[(j, k)] -= h_eta * xj * xk;
                    fis[(j, k)] -= f_eta * xj * xk;
                }
                obs[(j, gi)] -= h_eg * xj;
                obs[(gi, j)] -= h_eg * xj;
                fis[(j, gi)] -= f_eg * xj;
                fis[(gi, j)] -= f_eg * xj;
            }
            grad[gi] += g_gamma;
            obs[(gi, gi)] -= h_gamma;
            fis[(gi, gi)] -= f_gamma;
        }
        for g in 0..self.n_groups {
            let j = p + g;
            grad[j] -= self.lambda * theta[j];
            obs[(j, j)] += self.lambda;
            fis[(j, j)] += self.lambda;
        }
        Eval {
            pen_ll: ll - self.penalty(theta),
            ll,
            grad,
            neg_hess: obs,
            fisher: fis,
        }
    }
}

/// Fit a beta regression of `response` on the formula `terms`.
///
/// The mean uses a logit link over an intercept, the terms (categoricals
/// treatment-coded) and, when enabled, one ridge-penalized intercept per
/// document; precision is constant on the log scale. Responses are squeezed
/// off the boundary first. Optimization is Newton's method on the penalized
/// log-likelihood with the observed Hessian, falling back to Fisher scoring
/// where the observed Hessian is not negative definite, and step-halving so
/// that the objective never decreases.
pub fn beta_fit(data: &Dataset, terms: &[&str], response: Response, opts: &BetaOptions) -> Result<BetaRegFit> {
    let design = Design::build(data, terms)?;
    let p = design.n_columns();
    let n = data.rows.len();
    if n < opts.min_rows_per_coef * p {
        return Err(Error::Stats(format!(
            "{n} rows for {p} coefficients; need at least {} per coefficient",
            opts.min_rows_per_coef
        )));
    }
    design.check_rank()?;
    if opts.doc_effects && opts.penalty <= 0.0 {
        return Err(Error::Config("document intercepts need a positive penalty".into()));
    }

    let raw: Vec<f64> = data.rows.iter().map(|r| response_of(r, response)).collect();
    if let Some(bad) = raw.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Stats(format!("response value {bad} outside [0, 1]")));
    }
    let y = squeeze(&raw);

    let mut doc_index: BTreeMap<&str, usize> = BTreeMap::new();
    if opts.doc_effects {
        for r in &data.rows {
            let next = doc_index.len();
            doc_index.entry(r.doc_id.as_str()).or_insert(next);
        }
    }
    let groups: Vec<usize> = if opts.doc_effects {
        data.rows.iter().map(|r| doc_index[r.doc_id.as_str()]).collect()
    } else {
        vec![0; n]
    };
    let problem = Problem {
        x: design.matrix.clone(),
        y,
        groups,
        n_groups: doc_index.len(),
        lambda: opts.penalty,
    };

    let mut theta = start_values(&problem);
    let mut current = problem.evaluate(&theta);
    let mut trace = vec![current.pen_ll];
    let mut iterations = 0;
    loop {
        let max_score = current.grad.amax();
        if max_score < opts.tolerance {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence { iterations, max_score });
        }
        iterations += 1;
        let step = current
            .neg_hess
            .clone()
            .cholesky()
            .or_else(|| current.fisher.clone().cholesky())
            .map(|c| c.solve(&current.grad))
            .ok_or_else(|| Error::RankDeficient("information matrix is not positive definite".into()))?;

        // The objective is a sum of n terms, so its rounding error grows with
        // n. Below that resolution the line search cannot tell ascent from
        // noise, and the pure Newton step is taken.
        let decrement = current.grad.dot(&step);
        if decrement <= f64::EPSILON * (64.0 + n as f64) * (1.0 + current.pen_ll.abs()) {
            theta += &step;
            current = problem.evaluate(&theta);
            trace.push(current.pen_ll);
            continue;
        }
        // candidates are compared with a value from the same routine
        let base = problem.log_lik(&theta) - problem.penalty(&theta);
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let candidate = &theta + &step * scale;
            let value = problem.log_lik(&candidate) - problem.penalty(&candidate);
            if value.is_finite() && value >= base {
                accepted = Some(candidate);
                break;
            }
            scale /= 2.0;
        }
        match accepted {
            Some(next) => {
                theta = next;
                current = problem.evaluate(&theta);
                trace.push(current.pen_ll);
            }
            None => return Err(Error::NonConvergence { iterations, max_score }),
        }
    }

    let cov = current
        .neg_hess
        .clone()
        .cholesky()
        .or_else(|| current.fisher.clone().cholesky())
        .map(|c| c.inverse())
        .ok_or_else(|| Error::RankDeficient("information matrix is singular at the optimum".into()))?;
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let coefficients: Vec<f64> = (0..p).map(|j| theta[j]).collect();
    let std_errors: Vec<f64> = (0..p).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let z_values: Vec<f64> = coefficients.iter().zip(&std_errors).map(|(b, s)| b / s).collect();
    let p_values = z_values
        .iter()
        .map(|z| (2.0 * normal.sf(z.abs())).clamp(0.0, 1.0))
        .collect();
    let doc_intercepts = doc_index
        .iter()
        .map(|(doc, &g)| (doc.to_string(), theta[p + g]))
        .collect();

    Ok(BetaRegFit {
        response,
        terms: design.terms.clone(),
        coef_names: design.names.clone(),
        coefficients,
        std_errors,
        z_values,
        p_values,
        precision: theta[problem.dim() - 1].exp(),
        doc_intercepts,
        log_likelihood: current.ll,
        penalized_log_likelihood: current.pen_ll,
        trace,
        iterations,
        n_obs: n,
        options: *opts,
        rows_key: rows_key(data, response),
    })
}

/// Least squares on logit(y) for β, a moment estimate for the precision.
fn start_values(problem: &Problem) -> DVector<f64> {
    let p = problem.x.ncols();
    let mut theta = DVector::zeros(problem.dim());
    let z = DVector::from_iterator(problem.y.len(), problem.y.iter().map(|&y| (y / (1.0 - y)).ln()));
    let xtx = problem.x.transpose() * &problem.x;
    if let Some(chol) = xtx.cholesky() {
        let beta = chol.solve(&(problem.x.transpose() * &z));
        for j in 0..p {
            theta[j] = beta[j];
        }
    }
    let n = problem.y.len() as f64;
    let mean = problem.y.iter().sum::<f64>() / n;
    let var = problem.y.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n;
    let phi = if var > 0.0 { (mean * (1.0 - mean) / var - 1.0).max(0.5) } else { 10.0 };
    let last = problem.dim() - 1;
    theta[last] = phi.ln();
    theta
}

/// Likelihood-ratio test of a reduced model nested in `full`.
///
/// Uses the penalized log-likelihoods both fits maximized; a negative
/// difference from incomplete convergence is clamped to 0 with a warning.
pub fn lrt(full: &BetaRegFit, reduced: &BetaRegFit) -> Result<TestResult> {
    if full.response != reduced.response {
        return Err(Error::NotNested("models use different responses".into()));
    }
    if full.rows_key != reduced.rows_key || full.n_obs != reduced.n_obs {
        return Err(Error::NotNested("models were fitted on different rows".into()));
    }
    if full.options.doc_effects != reduced.options.doc_effects || full.options.penalty != reduced.options.penalty {
        return Err(Error::NotNested("models differ in their document-intercept settings".into()));
    }
    if let Some(extra) = reduced.terms.iter().find(|t| !full.terms.contains(t)) {
        return Err(Error::NotNested(format!("reduced term `{extra}` missing from the full model")));
    }
    if let Some(extra) = reduced.coef_names.iter().find(|t| !full.coef_names.contains(t)) {
        return Err(Error::NotNested(format!("reduced coefficient `{extra}` missing from the full model")));
    }
    let df = full.n_params() - reduced.n_params();
    let mut statistic = 2.0 * (full.penalized_log_likelihood - reduced.penalized_log_likelihood);
    if statistic < 0.0 {
        if statistic < -1e-6 {
            log::warn!("likelihood-ratio statistic {statistic:e} < 0 clamped to 0; check convergence");
        }
        statistic = 0.0;
    }
    let p_value = if df == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(df as f64).map_err(|e| Error::Stats(e.to_string()))?;
        dist.sf(statistic).clamp(0.0, 1.0)
    };
    Ok(TestResult {
        statistic,
        effect_size: None,
        df: df as f64,
        p_value,
    })
}
