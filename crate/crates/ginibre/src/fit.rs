//! Least-squares rate fits for the asymptotic checks.

use crate::error::{Error, Result};

/// y ≈ intercept + slope·t, with the coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(t: &[f64], y: &[f64]) -> Result<LinearFit> {
    if t.len() != y.len() || t.len() < 2 {
        return Err(Error::Parameter(format!("fit needs matching samples (>= 2), got {} and {}", t.len(), y.len())));
    }
    if t.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Parameter("fit input contains a non-finite value".into()));
    }
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|a| (a - mt).powi(2)).sum();
    let sty: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if stt == 0.0 {
        return Err(Error::Parameter("fit abscissae are all equal".into()));
    }
    let slope = sty / stt;
    let intercept = my - slope * mt;
    let sse: f64 = t.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit { slope, intercept, r2 })
}

/// Exponent a in v ≈ C·N^a: fit of log v against log N.
pub fn power_fit(ns: &[usize], v: &[f64]) -> Result<LinearFit> {
    let t: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = v.iter().map(|a| a.ln()).collect();
    linear_fit(&t, &y)
}

/// Rate c in v ≈ C·e^{cN}: fit of log v against N.
pub fn exponential_fit(ns: &[usize], v: &[f64]) -> Result<LinearFit> {
    let t: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let y: Vec<f64> = v.iter().map(|a| a.ln()).collect();
    linear_fit(&t, &y)
}

/// Whether |v| strictly decreases along the sequence.
pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1].abs() < w[0].abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power() {
        let ns = [16, 32, 64, 128];
        let v: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powf(-1.5)).collect();
        let f = power_fit(&ns, &v).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn exponential_rate() {
        let ns = [8, 12, 16, 20];
        let v: Vec<f64> = ns.iter().map(|&n| (-0.4 * n as f64).exp()).collect();
        assert!((exponential_fit(&ns, &v).unwrap().slope + 0.4).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(linear_fit(&[1.0], &[2.0]).is_err());
        assert!(power_fit(&[1, 2], &[1.0, 0.0]).is_err());
        assert!(strictly_decreasing(&[3.0, -2.0, 1.0]));
        assert!(!strictly_decreasing(&[1.0, 1.0]));
    }
}
