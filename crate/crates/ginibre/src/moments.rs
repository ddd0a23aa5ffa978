//! Toeplitz determinants of the contour moments and the exact expectation
//! E|det(G_N − x)|^γ through the Heine identity.

use crate::contours::{choose_radius, closed_form_moments, ContourMoments};
use crate::cplx::{CExt, C, C64};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::linalg::{lu, CMat};
use crate::logc::LogComplex;
use crate::params::ModelParams;
use crate::quad::graded_unit;
use crate::real::{Precision, Real};
use crate::special::{log_gamma, log_gamma_real};

/// Toeplitz matrix (c_{r−s})_{r,s<size}, optionally balanced by ρ^{r−s}.
#[derive(Debug, Clone)]
pub struct ToeplitzSystem<T: Real> {
    pub moments: ContourMoments<T>,
    pub size: usize,
    pub balanced: bool,
    pub radius: f64,
}

impl<T: Real> ToeplitzSystem<T> {
    pub fn new(moments: ContourMoments<T>, size: usize, radius: Option<f64>) -> Self {
        assert!(size >= 1 && size <= moments.n + 1);
        match radius {
            Some(r) => ToeplitzSystem { moments, size, balanced: true, radius: r },
            None => ToeplitzSystem { moments, size, balanced: false, radius: 1.0 },
        }
    }

    pub fn matrix(&self) -> CMat<T> {
        let n = self.size;
        let rho = T::from_f64(self.radius);
        let mut pw = vec![T::one(); 2 * n];
        // pw[n-1+m] = ρ^m for m ∈ [−(n−1), n−1].
        for m in 1..n {
            pw[n - 1 + m] = pw[n - 2 + m] * rho;
            pw[n - 1 - m] = pw[n - m] / rho;
        }
        CMat::from_fn(n, |r, s| {
            let m = r as i64 - s as i64;
            let v = self.moments.get(m);
            if self.balanced {
                v * pw[(n as i64 - 1 + m) as usize]
            } else {
                v
            }
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DetOutcome<T: Real> {
    pub log_det: LogComplex<T>,
    /// Row-scaled condition number Σ_{r,s} |A⁻¹_{sr}| max_t |A_{rt}|.
    pub condition: f64,
    /// Smallest over largest pivot magnitude.
    pub pivot_ratio: f64,
}

/// Pivots below 10^{−(digits−4)} of the matrix scale signal a zero determinant.
pub fn singular_threshold<T: Real>() -> f64 {
    10f64.powi(-(T::DIGITS - 4))
}

/// Row-scaled condition estimate via the explicit inverse.
fn row_condition<T: Real>(a: &CMat<T>, f: &crate::linalg::Lu<T>) -> f64 {
    let n = a.n;
    let rowmax: Vec<f64> = (0..n).map(|r| (0..n).fold(0.0f64, |m, t| m.max(a[(r, t)].cabs().to_f64()))).collect();
    let mut total = 0.0;
    let mut e = vec![C::new(T::zero(), T::zero()); n];
    for r in 0..n {
        // Column r of A⁻¹.
        e.iter_mut().for_each(|z| *z = C::new(T::zero(), T::zero()));
        e[r] = C::new(T::one(), T::zero());
        let col = f.solve(&e);
        let s: f64 = col.iter().map(|z| z.cabs().to_f64()).sum();
        total += s * rowmax[r];
    }
    total
}

pub fn log_det_toeplitz<T: Real>(t: &ToeplitzSystem<T>) -> Result<DetOutcome<T>> {
    let a = t.matrix();
    let f = lu(&a);
    f.check(singular_threshold::<T>())?;
    let condition = row_condition(&a, &f);
    // Balancing is a similarity transform, so no correction is needed.
    let log_det = f.log_det();
    if !log_det.is_finite() {
        return Err(Error::Singular { index: f.min_pivot_index, pivot: 0.0 });
    }
    Ok(DetOutcome { log_det, condition, pivot_ratio: 1.0 / f.condition })
}

/// Σ_{k=0}^{n} [log π + log Γ(1+γ/2+k) − (1+γ/2+k) log N], the log of the
/// diagonal factor relating D_n to D̂_n.
pub fn log_diag_factor<T: Real>(p: &ModelParams, n: usize) -> Result<C<T>> {
    let a = p.half_gamma::<T>();
    let ln_pi = T::pi().ln();
    let ln_n = p.n_t::<T>().ln();
    let mut acc = C::new(T::zero(), T::zero());
    for k in 0..=n {
        let s = a + T::one() + T::from_f64(k as f64);
        acc = acc + log_gamma(s)? - s * ln_n + ln_pi;
    }
    Ok(acc)
}

/// log D̂_n in the working precision from closed-form moments.
pub fn log_dhat_in<T: Real>(p: &ModelParams, n: usize, moments: Option<&ContourMoments<T>>) -> Result<DetOutcome<T>> {
    let owned;
    let cm = match moments {
        Some(m) => m,
        None => {
            owned = closed_form_moments::<T>(p, n)?;
            &owned
        }
    };
    let rho = choose_radius(p, n);
    log_det_toeplitz(&ToeplitzSystem::new(cm.clone(), n + 1, Some(rho)))
}

/// log D_n^{(N)}(F) in the working precision.
pub fn log_dn_in<T: Real>(p: &ModelParams, n: usize) -> Result<DetOutcome<T>> {
    let d = log_dhat_in::<T>(p, n, None)?;
    let diag = log_diag_factor::<T>(p, n)?;
    Ok(DetOutcome { log_det: d.log_det * LogComplex::from_log(diag), ..d })
}

/// (log N!, log Z_N) with Z_N = π^N ∏_{k=1}^N k! / N^{N(N+1)/2}.
#[allow(non_snake_case)]
pub fn log_factorial_and_logZ<T: Real>(n: usize) -> Result<(T, T)> {
    let nf = T::from_f64(n as f64);
    let log_fact = log_gamma_real(nf + T::one())?;
    let mut lz = nf * T::pi().ln();
    for k in 1..=n {
        lz += log_gamma_real(T::from_f64(k as f64 + 1.0))?;
    }
    lz -= nf * (nf + T::one()) * T::from_f64(0.5) * nf.ln();
    Ok((log_fact, lz))
}

/// log E|det(G_N − x)|^γ = log N! − log Z_N + log D_{N−1}, working precision.
pub fn log_expectation_in<T: Real>(p: &ModelParams) -> Result<DetOutcome<T>> {
    let d = log_dn_in::<T>(p, p.n - 1)?;
    let (lf, lz) = log_factorial_and_logZ::<T>(p.n)?;
    let v = d.log_det * LogComplex::new(lf - lz, T::zero());
    Ok(DetOutcome { log_det: v, ..d })
}

/// A log-space result tagged with the precision that produced it.
#[derive(Debug, Clone, Copy)]
pub struct Evaluated {
    pub value: LogComplex<f64>,
    pub precision_used: Precision,
    pub condition: f64,
    /// True when the double-precision pass was deemed ill-conditioned.
    pub escalated: bool,
    /// Condition estimate above the escalation threshold of the precision used.
    pub cond_flag: bool,
}

/// Condition estimates above 10^{digits−6} trigger escalation.
pub fn escalation_threshold(prec: Precision) -> f64 {
    10f64.powi(prec.digits() - 6)
}

/// Beyond this condition estimate an extended-precision result carries no
/// trustworthy digits in log_mag beyond 1e−2.
pub fn exhaustion_threshold() -> f64 {
    10f64.powi(Precision::Extended.digits() - 2)
}

fn with_escalation(p: &ModelParams, run64: impl Fn() -> Result<DetOutcome<f64>>, rundd: impl Fn() -> Result<DetOutcome<Dd>>) -> Result<Evaluated> {
    let extended = |escalated| -> Result<Evaluated> {
        let d = rundd()?;
        if d.condition > exhaustion_threshold() {
            return Err(Error::EscalationExhausted { condition: d.condition });
        }
        Ok(Evaluated {
            value: d.log_det.to_f64(),
            precision_used: Precision::Extended,
            condition: d.condition,
            escalated,
            cond_flag: d.condition > escalation_threshold(Precision::Extended),
        })
    };
    match p.precision {
        Precision::Extended => extended(false),
        Precision::Double => match run64() {
            Ok(d) if d.condition <= escalation_threshold(Precision::Double) => Ok(Evaluated {
                value: d.log_det,
                precision_used: Precision::Double,
                condition: d.condition,
                escalated: false,
                cond_flag: false,
            }),
            Ok(_) | Err(Error::Singular { .. }) => extended(true),
            Err(e) => Err(e),
        },
    }
}

/// log D_n^{(N)}(F) with double → extended escalation.
#[allow(non_snake_case)]
pub fn log_dN(p: &ModelParams, n: usize) -> Result<Evaluated> {
    with_escalation(p, || log_dn_in::<f64>(p, n), || log_dn_in::<Dd>(p, n))
}

/// log E|det(G_N − x)|^γ with double → extended escalation.
pub fn log_expectation(p: &ModelParams) -> Result<Evaluated> {
    p.validate()?;
    if p.gamma == C64::new(0.0, 0.0) {
        return Ok(Evaluated { value: LogComplex::one(), precision_used: p.precision, condition: 1.0, escalated: false, cond_flag: false });
    }
    with_escalation(p, || log_expectation_in::<f64>(p), || log_expectation_in::<Dd>(p))
}

/// Closed form at x = 0: Σ_{k=0}^{n} [log π + log Γ(k+1+γ/2) − (k+1+γ/2) log N].
pub fn log_dn_diagonal_limit(p: &ModelParams, n: usize) -> Result<C64> {
    log_diag_factor::<f64>(p, n)
}

/// ∫ w^i w̄^j |w−x|^γ e^{−N|w|²} d²w from the contour moments:
/// Σ_{l≤j} binom(j,l) x^{j−l} πΓ(1+γ/2+l)/N^{1+γ/2+l} c_{l−i}.
pub fn planar_moment_contour<T: Real>(i: usize, j: usize, p: &ModelParams, cm: &ContourMoments<T>) -> Result<C<T>> {
    let a = p.half_gamma::<T>();
    let x = p.x_t::<T>();
    let ln_n = p.n_t::<T>().ln();
    let mut acc = C::new(T::zero(), T::zero());
    let mut binom = T::one();
    for l in 0..=j {
        if l > 0 {
            binom = binom * T::from_f64((j - l + 1) as f64) / T::from_f64(l as f64);
        }
        let s = a + T::one() + T::from_f64(l as f64);
        let w = (log_gamma(s)? - s * ln_n).cexp() * T::pi();
        let xp = x.powi((j - l) as i32);
        acc = acc + w * cm.get(l as i64 - i as i64) * (binom * xp);
    }
    Ok(acc)
}

/// The same planar moment by 2D quadrature in polar coordinates centred at
/// x: graded Gauss–Legendre in the radius (absorbing ρ^{γ+1}) and the
/// trapezoidal rule in angle, doubled until two passes agree to 1e−9.
pub fn planar_moment_quadrature(i: usize, j: usize, p: &ModelParams) -> Result<C64> {
    if p.n > 12 {
        return Err(Error::Parameter(format!("quadrature oracle limited to N <= 12, got {}", p.n)));
    }
    let nf = p.n as f64;
    let x = p.x;
    let g = p.gamma;
    let r_cut = x + (40.0 / nf).sqrt();
    let radial: Vec<(f64, f64)> = graded_unit::<f64>(24, 30, 0.35).into_iter().map(|(t, w)| (t * r_cut, w * r_cut)).collect();
    let pass = |m: usize| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..m {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            let e = C64::from_polar(1.0, phi);
            let mut inner = C64::new(0.0, 0.0);
            for &(rho, wr) in &radial {
                let w = C64::new(x, 0.0) + e * rho;
                let val = w.powu(i as u32) * w.conj().powu(j as u32) * (-nf * w.norm_sqr()).exp();
                // |w−x|^γ ρ dρ with |w−x| = ρ.
                let rg = (g * rho.ln()).exp() * rho;
                inner += val * rg * wr;
            }
            acc += inner;
        }
        acc * (2.0 * std::f64::consts::PI / m as f64)
    };
    let mut m = 32;
    let mut prev = pass(m);
    let mut diff = f64::INFINITY;
    while m < 8192 {
        m *= 2;
        let cur = pass(m);
        diff = (cur - prev).norm();
        prev = cur;
        if diff < 1e-9 {
            return Ok(prev);
        }
    }
    Err(Error::Accuracy { op: "planar moment quadrature", residual: diff })
}

/// log det of the planar moment matrix (M_{ij})_{i,j≤n} built from contour moments.
pub fn log_det_planar<T: Real>(p: &ModelParams, n: usize) -> Result<LogComplex<T>> {
    let cm = closed_form_moments::<T>(p, n)?;
    let mut m = CMat::zeros(n + 1);
    for i in 0..=n {
        for j in 0..=n {
            m[(i, j)] = planar_moment_contour(i, j, p, &cm)?;
        }
    }
    let f = lu(&m);
    f.check(singular_threshold::<T>())?;
    Ok(f.log_det())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contours::{default_circle, laurent_coefficients};
    use std::f64::consts::PI;

    fn pr(n: usize, x: f64, g: f64) -> ModelParams {
        ModelParams::real(n, x, g).unwrap()
    }

    #[test]
    fn gamma_zero_gives_unit_dhat() {
        let p = pr(7, 0.4, 0.0);
        let d = log_dhat_in::<f64>(&p, 6, None).unwrap();
        assert!(d.log_det.log_mag.abs() < 1e-12 && d.log_det.phase.abs() < 1e-12);
        let e = log_expectation_in::<f64>(&p).unwrap();
        assert!(e.log_det.log_mag.abs() < 1e-10);
    }

    #[test]
    fn size_one_is_log_c0() {
        let p = pr(6, 0.5, 1.0);
        let d = log_dhat_in::<f64>(&p, 0, None).unwrap();
        assert!((d.log_det.log_mag - 1.6377447379660208f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn d1_gamma_zero_closed_form() {
        let p = pr(2, 0.5, 0.0);
        let v = log_dN(&p, 1).unwrap().value;
        assert!((v.log_mag - (PI * PI / 8.0).ln()).abs() < 1e-13);
    }

    #[test]
    fn log_z_small_n() {
        let (f1, z1) = log_factorial_and_logZ::<f64>(1).unwrap();
        assert!(f1.abs() < 1e-15 && (z1 - PI.ln()).abs() < 1e-15);
        let (f2, z2) = log_factorial_and_logZ::<f64>(2).unwrap();
        assert!((f2 - 2f64.ln()).abs() < 1e-14, "{f2}");
        assert!((z2 - (PI * PI / 4.0).ln()).abs() < 1e-14, "{z2}");
    }

    #[test]
    fn one_by_one_gaussian_moment() {
        for &x in &[0.1, 0.5, 0.9] {
            let v = log_expectation(&pr(1, x, 2.0)).unwrap().value;
            assert!((v.log_mag - (1.0 + x * x).ln()).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn planar_gaussian_moments() {
        let p = pr(2, 0.5, 0.0);
        let cm = closed_form_moments::<f64>(&p, 2).unwrap();
        let m00 = planar_moment_contour(0, 0, &p, &cm).unwrap();
        assert!((m00.re - PI / 2.0).abs() < 1e-14);
        let m11 = planar_moment_contour(1, 1, &p, &cm).unwrap();
        assert!((m11.re - PI / 4.0).abs() < 1e-14 && m11.im.abs() < 1e-15);
        let q = planar_moment_quadrature(0, 0, &pr(4, 0.5, 0.0)).unwrap();
        assert!((q.re - PI / 4.0).abs() < 1e-9);
        let q = planar_moment_quadrature(1, 0, &pr(4, 0.5, 0.0)).unwrap();
        assert!(q.norm() < 1e-10);
    }

    #[test]
    fn planar_routes_agree() {
        for &g in &[1.0, -0.5] {
            let p = pr(3, 0.4, g);
            let cm = laurent_coefficients::<f64>(&p, 3, &default_circle(&p)).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let a = planar_moment_contour(i, j, &p, &cm).unwrap();
                    let b = planar_moment_quadrature(i, j, &p).unwrap();
                    assert!((a - b).norm() < 1e-7 * a.norm().max(1e-3), "g={g} ({i},{j}): {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn planar_determinant_matches_heine_route() {
        let p = pr(6, 0.5, 1.0);
        let a = log_det_planar::<f64>(&p, 5).unwrap();
        let b = log_dN(&p, 5).unwrap().value;
        assert!((a.log_mag - b.log_mag).abs() < 1e-7);
    }

    #[test]
    fn balancing_does_not_change_determinant() {
        let p = ModelParams::new(10, 0.5, C64::new(1.0, 0.5)).unwrap();
        let cm = closed_form_moments::<f64>(&p, 9).unwrap();
        let a = log_det_toeplitz(&ToeplitzSystem::new(cm.clone(), 10, None)).unwrap();
        let b = log_det_toeplitz(&ToeplitzSystem::new(cm, 10, Some(choose_radius(&p, 9)))).unwrap();
        assert!((a.log_det.log_mag - b.log_det.log_mag).abs() < 1e-9);
        assert!(crate::logc::wrap_phase(a.log_det.phase - b.log_det.phase).abs() < 1e-9);
    }

    #[test]
    fn small_x_matches_diagonal_limit() {
        let p = pr(4, 1e-3, 1.0);
        let v = log_dN(&p, 3).unwrap().value;
        let d = log_dn_diagonal_limit(&p, 3).unwrap();
        assert!((v.log_mag - d.re).abs() < 1e-3);
    }
}
