//! Large-N formulas: the proven one-point asymptotics and the conjectured
//! multi-point product.

use crate::cplx::C64;
use crate::error::{Error, Result};
use crate::logc::LogComplex;
use crate::special::log_barnes_g;

/// γ²/8·log N + (γ/2)·N(x²−1) + (γ/4)·log 2π − log G(1+γ/2).
pub fn log_asymptotic(n: usize, x: f64, gamma: C64) -> Result<C64> {
    let nf = n as f64;
    let lg = log_barnes_g(C64::new(1.0, 0.0) + gamma * 0.5)?;
    Ok(gamma * gamma / 8.0 * nf.ln() + gamma * 0.5 * nf * (x * x - 1.0) + gamma / 4.0 * (2.0 * std::f64::consts::PI).ln() - lg)
}

/// The conjectured product over points z_j with exponents γ_j:
/// ∏_j N^{γ_j²/8} e^{Nγ_j(|z_j|²−1)/2} (2π)^{γ_j/4} / G(1+γ_j/2) · ∏_{i<j} |z_i−z_j|^{−γ_iγ_j/2}.
/// This is a CONJECTURE, not a theorem; every report carries that label.
pub fn conjecture_eval(points: &[(C64, C64)], n: usize) -> Result<LogComplex<f64>> {
    let mut acc = C64::new(0.0, 0.0);
    for (i, &(z, g)) in points.iter().enumerate() {
        if z.norm() >= 1.0 {
            return Err(Error::Domain(format!("point {z} is not inside the unit disk")));
        }
        if g.re <= -2.0 {
            return Err(Error::Parameter(format!("Re gamma must exceed -2, got {g}")));
        }
        acc += log_asymptotic(n, z.norm(), g)?;
        for &(z2, g2) in &points[..i] {
            let d = (z - z2).norm();
            if d == 0.0 {
                return Err(Error::Domain(format!("coincident points at {z}")));
            }
            acc -= g * g2 * 0.5 * d.ln();
        }
    }
    Ok(LogComplex::from_log(acc))
}

/// Label attached to every conjecture output.
pub const CONJECTURE_LABEL: &str = "CONJECTURE";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_two_prediction() {
        let v = log_asymptotic(16, 0.5, C64::new(2.0, 0.0)).unwrap();
        let want = 0.5 * 16f64.ln() + 16.0 * (0.25 - 1.0) + 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((v.re - want).abs() < 1e-13 && v.im.abs() < 1e-15);
    }

    #[test]
    fn conjecture_single_point_reduces() {
        let z = C64::new(0.3, 0.4);
        let g = C64::new(1.0, 0.2);
        let a = conjecture_eval(&[(z, g)], 12).unwrap();
        let b = log_asymptotic(12, 0.5, g).unwrap();
        assert!((a.log_mag - b.re).abs() < 1e-13);
        assert!(crate::logc::wrap_phase(a.phase - b.im).abs() < 1e-13);
    }

    #[test]
    fn conjecture_trivial_exponents() {
        let pts = [(C64::new(0.3, 0.0), C64::new(0.0, 0.0)), (C64::new(-0.3, 0.0), C64::new(0.0, 0.0))];
        let v = conjecture_eval(&pts, 8).unwrap();
        assert!(v.log_mag.abs() < 1e-15 && v.phase.abs() < 1e-15);
        let bad = [(C64::new(0.3, 0.0), C64::new(1.0, 0.0)), (C64::new(0.3, 0.0), C64::new(1.0, 0.0))];
        assert!(conjecture_eval(&bad, 8).is_err());
    }
}
