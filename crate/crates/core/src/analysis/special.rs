//! Special functions missing from `statrs`.

/// Trigamma function ψ₁(x) for x > 0: recurrence up to x ≥ 10, then the
/// asymptotic series.
pub fn trigamma(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/x + 1/(2x²) + Σ B_{2k} / x^{2k+1}
    let series = inv
        + 0.5 * inv2
        + inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0 - inv2 * 691.0 / 2730.0)))));
    acc + series
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::gamma::digamma;
    use std::f64::consts::PI;

    #[test]
    fn known_values() {
        assert_relative_eq!(trigamma(1.0), PI * PI / 6.0, max_relative = 1e-12);
        assert_relative_eq!(trigamma(0.5), PI * PI / 2.0, max_relative = 1e-12);
        assert!(trigamma(0.0).is_nan());
    }

    #[test]
    fn matches_digamma_derivative() {
        for &x in &[0.05, 0.3, 1.7, 4.2, 9.0, 55.0, 1e3] {
            let h = 1e-5 * x;
            let numeric = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
            assert_relative_eq!(trigamma(x), numeric, max_relative = 1e-6);
        }
    }
}
