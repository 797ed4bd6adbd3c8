use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Outcome of a significance test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    /// Cohen's d or φ; absent for likelihood-ratio tests.
    pub effect_size: Option<f64>,
    pub df: f64,
    pub p_value: f64,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Welch's unequal-variance t test (two-sided) with Cohen's d from the pooled
/// standard deviation. d is reported as a magnitude; the sign lives in t.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Stats(format!(
            "Welch t needs two samples of size ≥ 2 (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (va / na, vb / nb);
    if sa + sb == 0.0 {
        return Err(Error::Stats("both groups have zero variance".into()));
    }
    let t = (ma - mb) / (sa + sb).sqrt();
    let df = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Stats(e.to_string()))?;
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    let pooled = (((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0)).sqrt();
    Ok(TestResult {
        statistic: t,
        effect_size: Some((ma - mb).abs() / pooled),
        df,
        p_value: p,
    })
}

/// Pearson chi-square on a 2×2 table without continuity correction, with
/// φ = |ad − bc| / sqrt(product of marginals).
pub fn chi_square_phi(table: [[u64; 2]; 2]) -> Result<TestResult> {
    let [[a, b], [c, d]] = table.map(|r| r.map(|x| x as f64));
    let marginals = [a + b, c + d, a + c, b + d];
    if marginals.contains(&0.0) {
        return Err(Error::Stats(format!("2x2 table {table:?} has a zero marginal")));
    }
    let n = a + b + c + d;
    let product: f64 = marginals.iter().product();
    let chi2 = n * (a * d - b * c).powi(2) / product;
    let phi = (a * d - b * c).abs() / product.sqrt();
    let dist = ChiSquared::new(1.0).map_err(|e| Error::Stats(e.to_string()))?;
    Ok(TestResult {
        statistic: chi2,
        effect_size: Some(phi),
        df: 1.0,
        p_value: dist.sf(chi2).clamp(0.0, 1.0),
    })
}
