//! The differential identity for ∂_γ log D_{N−1}: a seven-term right-hand
//! side built from the pairs of degree N and N+1 and two Cauchy limits at x,
//! checked against a γ-difference of the determinant itself.

use crate::cauchy::{cauchy_limit_closed, divided_part, k1, LPoly};
use crate::contours::{closed_form_moments, eval_f, sigma_point, ContourMoments};
use crate::cplx::{cr, csin, from_c64, to_c64, CExt, C, C64};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::logc::{wrap_phase, LogComplex};
use crate::moments::log_dn_in;
use crate::orthopoly::{solve_biorth_with, BiorthPair};
use crate::params::ModelParams;
use crate::quad::graded_interval;
use crate::real::{Precision, Real};
use crate::special::digamma;

/// Nodes of the circular γ-stencil.
pub const STENCIL_NODES: usize = 16;
/// Radius of the circular γ-stencil.
pub const STENCIL_RADIUS: f64 = 0.05;

/// Centred difference (log D(γ+h) − log D(γ−h))/(2h), phase unwrapped.
pub fn lhs_partial_gamma_log_d(p: &ModelParams, h: f64) -> Result<C64> {
    if !(1e-8..=1e-2).contains(&h) {
        return Err(Error::Parameter(format!("difference step {h} outside [1e-8, 1e-2]")));
    }
    match p.precision {
        Precision::Double => centred::<f64>(p, h),
        Precision::Extended => centred::<Dd>(p, h),
    }
}

fn log_d_at<T: Real>(p: &ModelParams, gamma: C64) -> Result<LogComplex<T>> {
    let q = p.with_gamma(gamma);
    q.validate()?;
    Ok(log_dn_in::<T>(&q, p.n - 1)?.log_det)
}

fn log_diff<T: Real>(a: LogComplex<T>, b: LogComplex<T>) -> C<T> {
    C::new(a.log_mag - b.log_mag, wrap_phase(a.phase - b.phase))
}

fn centred<T: Real>(p: &ModelParams, h: f64) -> Result<C64> {
    let hp = log_d_at::<T>(p, p.gamma + h)?;
    let hm = log_d_at::<T>(p, p.gamma - h)?;
    Ok(to_c64(log_diff(hp, hm)) / (2.0 * h))
}

/// ∂_γ of a vector-valued analytic function of γ by the trapezoid rule on
/// a circle of radius `rho`: (1/M)Σ (F(γ_k) − F(γ))/(γ_k − γ). Subtracting
/// the centre value and dividing by the node offset in working precision
/// keeps the rounding error relative to the variation of F, not to F.
fn circle_derivative<T: Real>(
    gamma: C64,
    rho: f64,
    m: usize,
    mut f: impl FnMut(C64) -> Result<Vec<C<T>>>,
) -> Result<Vec<C<T>>> {
    let centre = f(gamma)?;
    let g0: C<T> = from_c64(gamma);
    let inv_m = T::one() / T::from_f64(m as f64);
    let mut acc = vec![C::new(T::zero(), T::zero()); centre.len()];
    for k in 0..m {
        let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        let gk = gamma + C64::from_polar(rho, th);
        let vals = f(gk)?;
        let delta = from_c64::<T>(gk) - g0;
        for ((a, v), c) in acc.iter_mut().zip(vals).zip(&centre) {
            *a = *a + (v - *c) / delta * inv_m;
        }
    }
    Ok(acc)
}

/// Flips the sign of χ, p and q when the principal square root switched
/// branch relative to `reference`.
fn align<T: Real>(mut pair: BiorthPair<T>, reference: &BiorthPair<T>) -> BiorthPair<T> {
    let r = pair.chi_c() / reference.chi_c();
    if r.re < T::zero() {
        let pi = T::pi();
        pair.chi = LogComplex::new(pair.chi.log_mag, wrap_phase(pair.chi.phase + pi));
        pair.chi_hat = LogComplex::new(pair.chi_hat.log_mag, wrap_phase(pair.chi_hat.phase + pi));
        for a in pair.p.iter_mut().chain(pair.q.iter_mut()) {
            *a = -*a;
        }
        pair.kappa = -pair.kappa;
    }
    pair
}

/// The two Cauchy limits, p-type (G = w^{−N}p_N) and q-type (G = w^{−1}q_N(w⁻¹)).
#[derive(Debug, Clone, Copy)]
pub struct LimitPair {
    pub p_limit: C64,
    pub q_limit: C64,
}

/// Diagnostics of the two numerical limit routes.
#[derive(Debug, Clone)]
pub struct LimitCheck {
    /// Approach along x + t e^{3iπ/4} with Richardson extrapolation.
    pub approach: LimitPair,
    /// ε-indented integral over Σ with the explicit correction term.
    pub regularized: LimitPair,
    /// |extrapolated_k − extrapolated_{k−1}| for the p-limit, per halving.
    pub approach_differences: Vec<f64>,
    /// Largest relative disagreement of either route with the closed form.
    pub max_rel_disagreement: f64,
}

/// Route disagreement above this is an error.
pub const LIMIT_ERROR_TOL: f64 = 1e-4;
/// Route disagreement expected in a healthy run.
pub const LIMIT_AGREE_TOL: f64 = 1e-5;

pub fn p_kernel<T: Real>(pn: &BiorthPair<T>) -> LPoly<T> {
    LPoly::from_poly(&pn.p, -(pn.j as i64))
}

pub fn q_kernel<T: Real>(pn: &BiorthPair<T>) -> LPoly<T> {
    LPoly::from_inverse_poly(&pn.q, -1)
}

/// Closed-form limits lim_{z→x} ∮_Σ G f/(s−z) ds/(2πi) for both kernels.
pub fn cauchy_limit_terms_in<T: Real>(p: &ModelParams, pn: &BiorthPair<T>, cm: &ContourMoments<T>) -> Result<(C<T>, C<T>)> {
    Ok((cauchy_limit_closed(&p_kernel(pn), p, cm)?, cauchy_limit_closed(&q_kernel(pn), p, cm)?))
}

/// Exponents of the approach expansion F(t) = L + Σ A_α t^α.
fn approach_exponents(gamma: C64) -> Vec<C64> {
    let half = gamma * 0.5;
    let mut out: Vec<C64> = Vec::new();
    for a in [C64::new(1.0, 0.0), half + 1.0, C64::new(2.0, 0.0), half + 2.0] {
        if a.re > 0.0 && out.iter().all(|b| (a - b).norm() > 1e-6) {
            out.push(a);
        }
    }
    out
}

/// Richardson step on a halving sequence, eliminating the t^a term.
fn richardson_step<T: Real>(vals: &[C<T>], a: C64) -> Vec<C<T>> {
    let r: C<T> = from_c64(C64::new(2.0, 0.0).powc(-a));
    let one = cr(T::one());
    vals.windows(2).map(|w| (w[1] - r * w[0]) / (one - r)).collect()
}

/// Approach along z = x + t e^{3iπ/4}, t_k = 0.05·2^{−k} (k = 3…10), with one
/// Richardson column per exponent, for several kernels sharing K₁. Returns
/// the limits and the gaps between successive entries of the first kernel's
/// last column.
pub fn approach_limits<T: Real>(gs: &[&LPoly<T>], p: &ModelParams, cm: &ContourMoments<T>) -> Result<(Vec<C<T>>, Vec<f64>)> {
    let dir = C64::from_polar(1.0, 0.75 * std::f64::consts::PI);
    let d0 = 0.05;
    let mut cols: Vec<Vec<C<T>>> = vec![Vec::new(); gs.len()];
    for k in 3..=10 {
        let z: C<T> = from_c64(C64::new(p.x, 0.0) + dir * (d0 * 0.5f64.powi(k)));
        let (k1v, _) = k1(z, p)?;
        for (col, g) in cols.iter_mut().zip(gs) {
            col.push(divided_part(g, z, cm)? + g.shifted(-1).eval(z) * k1v);
        }
    }
    let exps = approach_exponents(p.gamma);
    let mut out = Vec::with_capacity(gs.len());
    let mut diffs = Vec::new();
    for (i, mut col) in cols.into_iter().enumerate() {
        for &a in &exps {
            if col.len() < 4 {
                break;
            }
            col = richardson_step(&col, a);
        }
        if i == 0 {
            diffs = col.windows(2).map(|w| (w[1] - w[0]).cabs().to_f64()).collect();
        }
        out.push(col[col.len() - 1]);
    }
    Ok((out, diffs))
}

/// Polar angle where Σ is at distance ε from x (upper half).
fn indentation_angle<T: Real>(x: T, eps: T) -> T {
    let (mut lo, mut hi) = (T::zero(), T::from_f64(std::f64::consts::FRAC_PI_2));
    let xc = cr(x);
    let half = T::from_f64(0.5);
    for _ in 0..120 {
        let mid = (lo + hi) * half;
        let (w, _) = sigma_point::<T>(x, mid);
        if (w - xc).cabs() < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * half
}

/// Indentation radii ε_k = 10⁻⁴·2^{−k} of the regularized route.
pub const REGULARIZED_EPS: [f64; 6] = [1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6, 3.125e-6];

/// Nodes (θ, weight) on [lo, hi] ∪ its mirror [2π−hi, 2π−lo], returned as
/// (w, dw·weight, f(w)/(w−x)).
fn sigma_nodes<T: Real>(p: &ModelParams, lo: T, hi: T, levels: usize) -> Result<Vec<(C<T>, C<T>, C<T>)>> {
    let x = p.x_t::<T>();
    let xc = cr(x);
    let two_pi = T::pi() * T::from_f64(2.0);
    let order = if T::DIGITS > 20 { 20 } else { 12 };
    let mut out = Vec::new();
    for (th, wt) in graded_interval::<T>(lo, hi, order, levels, 0.5) {
        for t in [th, two_pi - th] {
            let (w, dw) = sigma_point::<T>(x, t);
            out.push((w, dw * wt, eval_f(w, p)? / (w - xc)));
        }
    }
    Ok(out)
}

/// Regularized Σ integrals for each ε in `REGULARIZED_EPS` and each kernel:
/// ∫_{Σ_ε} G f/(w−x) dw/(2πi) + f̃(x)·ε^{γ/2}/(γ/2)·2i sin(θ_εγ/2), with
/// f̃(w) = G(w)w^{−γ/2}e^{−Nxw}/(2πi). The part of Σ outside the largest
/// indentation is shared; each smaller ε adds two short arcs.
pub fn regularized_values<T: Real>(gs: &[&LPoly<T>], p: &ModelParams) -> Result<Vec<Vec<C<T>>>> {
    let x = p.x_t::<T>();
    let xc = cr(x);
    let pi = T::pi();
    let two_pi_i = C::new(T::zero(), pi * T::from_f64(2.0));
    let thetas: Vec<T> = REGULARIZED_EPS.iter().map(|&e| indentation_angle(x, T::from_f64(e))).collect();
    let sum = |nodes: &[(C<T>, C<T>, C<T>)], g: &LPoly<T>| {
        nodes.iter().fold(C::new(T::zero(), T::zero()), |a, (w, dw, fw)| a + g.eval(*w) * *fw * *dw) / two_pi_i
    };
    let levels = ((std::f64::consts::PI / thetas[0].to_f64()).ln() / std::f64::consts::LN_2).ceil() as usize + 4;
    let outer = sigma_nodes(p, thetas[0], pi, levels)?;
    let mut running: Vec<C<T>> = gs.iter().map(|g| sum(&outer, g)).collect();
    let half = p.half_gamma::<T>();
    let two_i = C::new(T::zero(), T::from_f64(2.0));
    let damp = xc.cpow(-half) * (-(p.n_t::<T>() * x * x)).exp() / two_pi_i;
    let mut out = vec![Vec::with_capacity(REGULARIZED_EPS.len()); gs.len()];
    for (k, &eps) in REGULARIZED_EPS.iter().enumerate() {
        if k > 0 {
            let seg = sigma_nodes(p, thetas[k], thetas[k - 1], 4)?;
            for (r, g) in running.iter_mut().zip(gs) {
                *r = *r + sum(&seg, g);
            }
        }
        let (wa, _) = sigma_point::<T>(x, thetas[k]);
        let theta_eps = (wa - xc).carg();
        let corr = if to_c64(half).norm() < 1e-300 {
            // ε^a/a · 2i sin(θa) → 2iθ as a → 0.
            two_i * theta_eps
        } else {
            cr(T::from_f64(eps)).cpow(half) / half * two_i * csin(half * theta_eps)
        };
        for ((o, r), g) in out.iter_mut().zip(&running).zip(gs) {
            o.push(*r + g.eval(xc) * damp * corr);
        }
    }
    Ok(out)
}

/// ε → 0 limit of the regularized integrals, extrapolated in ε^{1+γ/2} and ε^{2+γ/2}.
pub fn regularized_limits<T: Real>(gs: &[&LPoly<T>], p: &ModelParams) -> Result<Vec<C<T>>> {
    let half = p.gamma * 0.5;
    // For γ = 2, 4, … f is analytic at x and the error is already O(ε^{γ/2+1}) with no fractional terms to remove.
    let even = p.gamma.im == 0.0 && p.gamma.re >= 2.0 && half.re.fract() == 0.0;
    Ok(regularized_values(gs, p)?
        .into_iter()
        .map(|mut col| {
            if !even {
                for a in [half + 1.0, half + 2.0] {
                    col = richardson_step(&col, a);
                }
            }
            col[col.len() - 1]
        })
        .collect())
}

/// Both numerical routes for the two limits, run in extended precision and
/// compared with `closed`. Disagreement is measured relative to
/// max(|limit|, ∮|G f/(s−x)||ds|/2π over Σ away from x): the q-limit can be
/// many orders below its integrand.
pub fn check_cauchy_limits(p: &ModelParams, closed: LimitPair) -> Result<LimitCheck> {
    let cm = closed_form_moments::<Dd>(p, p.n + 3)?;
    let pn = solve_biorth_with::<Dd>(p, p.n, &cm)?;
    let (gp, gq) = (p_kernel(&pn), q_kernel(&pn));
    let (app, diffs) = approach_limits(&[&gp, &gq], p, &cm)?;
    let reg = regularized_limits(&[&gp, &gq], p)?;
    let (ap, aq, rp, rq) = (to_c64(app[0]), to_c64(app[1]), to_c64(reg[0]), to_c64(reg[1]));
    let sp = integrand_scale(&gp, p)?.max(closed.p_limit.norm());
    let sq = integrand_scale(&gq, p)?.max(closed.q_limit.norm());
    let dp = (ap - closed.p_limit).norm().max((rp - closed.p_limit).norm()) / sp;
    let dq = (aq - closed.q_limit).norm().max((rq - closed.q_limit).norm()) / sq;
    let worst = dp.max(dq);
    if worst > LIMIT_ERROR_TOL {
        let (a, b) = if dp >= dq { (ap, rp) } else { (aq, rq) };
        return Err(Error::Consistency { what: "Cauchy limit at x (approach vs regularized)", a, b });
    }
    Ok(LimitCheck {
        approach: LimitPair { p_limit: ap, q_limit: aq },
        regularized: LimitPair { p_limit: rp, q_limit: rq },
        approach_differences: diffs,
        max_rel_disagreement: worst,
    })
}

/// (1/2π)∫_Σ |G f/(s−x)| |ds| over the part of Σ at distance ≥ 0.05 from x.
fn integrand_scale<T: Real>(g: &LPoly<T>, p: &ModelParams) -> Result<f64> {
    let x = p.x;
    let th = indentation_angle(x, 0.05);
    let m = 512;
    let mut acc = 0.0;
    let step = (2.0 * std::f64::consts::PI - 2.0 * th) / m as f64;
    for k in 0..m {
        let t = th + (k as f64 + 0.5) * step;
        let (w, dw) = sigma_point::<f64>(x, t);
        let gw = to_c64(g.eval(from_c64(w)));
        acc += (gw * eval_f(w, p)? / (w - x)).norm() * dw.norm() * step;
    }
    Ok(acc / (2.0 * std::f64::consts::PI))
}

/// Names of the seven right-hand-side terms, in order.
pub const TERM_NAMES: [&str; 7] = [
    "chi_hat_derivative",
    "p_cauchy_limit",
    "q_at_zero_derivative",
    "chi_derivative",
    "q_cauchy_limit",
    "kappa_derivative",
    "gamma_sum",
];

#[derive(Debug, Clone)]
pub struct DiffIdentityReport {
    pub params: ModelParams,
    /// ∂_γ log D_{N−1} by differencing.
    pub lhs: C64,
    /// Sum of the seven terms.
    pub rhs: C64,
    /// Nx²/2 + term 7.
    pub rhs_asymptotic: C64,
    pub terms: [(&'static str, C64); 7],
    pub limits: LimitPair,
    pub limit_check: Option<LimitCheck>,
    /// |lhs − rhs| / max(1, |lhs|).
    pub residual: f64,
    /// rhs − rhs_asymptotic.
    pub remainder: C64,
    pub precision_used: Precision,
}

/// Term 7: Σ_{j<N} [ψ(γ/2+j+1)/2 − (log N)/2].
pub fn gamma_sum_term<T: Real>(p: &ModelParams) -> Result<C<T>> {
    let a = p.half_gamma::<T>();
    let half = T::from_f64(0.5);
    let ln_n = p.n_t::<T>().ln();
    let mut acc = C::new(T::zero(), T::zero());
    for j in 0..p.n {
        acc = acc + (digamma(a + T::from_f64(j as f64 + 1.0))? - ln_n) * half;
    }
    Ok(acc)
}

struct PairData<T: Real> {
    pn: BiorthPair<T>,
    pn1: BiorthPair<T>,
    cm: ContourMoments<T>,
}

fn pair_data<T: Real>(p: &ModelParams) -> Result<PairData<T>> {
    let cm = closed_form_moments::<T>(p, p.n + 3)?;
    let pn = solve_biorth_with(p, p.n, &cm)?;
    let pn1 = solve_biorth_with(p, p.n + 1, &cm)?;
    Ok(PairData { pn, pn1, cm })
}

fn assemble<T: Real>(p: &ModelParams, check_limits: bool) -> Result<DiffIdentityReport> {
    let n = p.n;
    let base = pair_data::<T>(p)?;
    let x = p.x_t::<T>();
    let xc = cr(x);
    let inv_x = cr(T::one() / x);
    let zero = C::new(T::zero(), T::zero());
    let base_log_d = log_d_at::<T>(p, p.gamma)?;
    // Quantities differentiated in γ: log D_{N−1}, χ̂_N, q_N(1/x), q_N(0), χ_N, p_N(x), κ_N.
    let derivs = circle_derivative::<T>(p.gamma, STENCIL_RADIUS, STENCIL_NODES, |g| {
        let q = p.with_gamma(g);
        q.validate()?;
        let d = pair_data::<T>(&q)?;
        let pn = align(d.pn, &base.pn);
        let ld = log_diff(log_d_at::<T>(p, g)?, base_log_d);
        Ok(vec![ld, pn.chi_hat_c(), pn.eval_q(inv_x), pn.q[0], pn.chi_c(), pn.eval_p(xc), pn.kappa])
    })?;
    let [d_logd, d_chih, d_qx, d_q0, d_chi, d_px, d_kappa]: [C<T>; 7] = derivs.try_into().map_err(|_| Error::Assembly("stencil"))?;
    let (pn, pn1) = (&base.pn, &base.pn1);
    let (chi, chih) = (pn.chi_c(), pn.chi_hat_c());
    let chi1 = pn1.chi_c();
    let nt = T::from_f64(n as f64);
    let half_g = p.half_gamma::<T>();
    let (p_lim, q_lim) = cauchy_limit_terms_in(p, pn, &base.cm)?;
    let nx = nt * x;
    let t1 = -(half_g + nt) * d_chih / chih;
    let t2 = half_g * x.powi(n as i32) * d_qx * p_lim;
    // Sign as produced by the proof's boundary-term computation.
    let t3 = (pn1.p[0] / chi1) * (d_q0 / chih) * nx;
    let t4 = -(d_chi / chi) * nt;
    let t5 = -(half_g * d_px * x * q_lim);
    let t6 = (d_kappa / chi - (d_chi / chi) * (pn1.kappa / chi1)) * nx;
    let t7 = gamma_sum_term::<T>(p)?;
    let vals = [t1, t2, t3, t4, t5, t6, t7];
    let mut terms = [("", C64::new(0.0, 0.0)); 7];
    let mut rhs = zero;
    for (i, v) in vals.iter().enumerate() {
        if !v.finite() {
            return Err(Error::Assembly(TERM_NAMES[i]));
        }
        terms[i] = (TERM_NAMES[i], to_c64(*v));
        rhs = rhs + *v;
    }
    let asym = cr(nx * x * T::from_f64(0.5)) + t7;
    let lhs = to_c64(d_logd);
    let rhs64 = to_c64(rhs);
    let limits = LimitPair { p_limit: to_c64(p_lim), q_limit: to_c64(q_lim) };
    let limit_check = if check_limits { Some(check_cauchy_limits(p, limits)?) } else { None };
    Ok(DiffIdentityReport {
        params: *p,
        lhs,
        rhs: rhs64,
        rhs_asymptotic: to_c64(asym),
        terms,
        limits,
        limit_check,
        residual: (lhs - rhs64).norm() / lhs.norm().max(1.0),
        remainder: to_c64(rhs - asym),
        precision_used: if T::DIGITS > 20 { Precision::Extended } else { Precision::Double },
    })
}

/// Assembles the report at the precision requested by `p`, with the
/// numerical limit routes run as cross-checks when `check_limits` is set.
pub fn rhs_differential_identity(p: &ModelParams, check_limits: bool) -> Result<DiffIdentityReport> {
    p.validate()?;
    match p.precision {
        Precision::Double => assemble::<f64>(p, check_limits),
        Precision::Extended => assemble::<Dd>(p, check_limits),
    }
}

/// The two limits at double precision.
pub fn cauchy_limit_terms(p: &ModelParams) -> Result<(C64, C64)> {
    let cm = closed_form_moments::<f64>(p, p.n + 3)?;
    let pn = solve_biorth_with::<f64>(p, p.n, &cm)?;
    cauchy_limit_terms_in(p, &pn, &cm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(n: usize, x: f64, g: C64) -> ModelParams {
        ModelParams::new(n, x, g).unwrap()
    }

    #[test]
    fn identity_holds_at_reference_point() {
        let p = pr(6, 0.5, C64::new(1.0, 0.0));
        let r = rhs_differential_identity(&p, true).unwrap();
        assert!(r.residual < 1e-5, "{r:?}");
        let c = r.limit_check.unwrap();
        assert!(c.max_rel_disagreement < LIMIT_AGREE_TOL, "{c:?}");
    }

    #[test]
    fn identity_holds_for_imaginary_gamma() {
        let p = pr(6, 0.5, C64::new(0.0, 0.5));
        let r = rhs_differential_identity(&p, true).unwrap();
        assert!(r.residual < 1e-5, "{r:?}");
    }

    #[test]
    fn lhs_matches_diagonal_limit() {
        let p = pr(2, 1e-3, C64::new(0.0, 0.0));
        let v = lhs_partial_gamma_log_d(&p, 1e-5).unwrap();
        let want: C64 = (0..2).map(|j| digamma(C64::new(j as f64 + 1.0, 0.0)).unwrap() * 0.5 - 2f64.ln() / 2.0).sum();
        assert!((v - want).norm() < 1e-3, "{v} vs {want}");
    }

    #[test]
    fn centred_difference_is_second_order() {
        let p = pr(6, 0.5, C64::new(1.0, 0.0));
        let h = 1e-2;
        let a = lhs_partial_gamma_log_d(&p, h).unwrap();
        let b = lhs_partial_gamma_log_d(&p, h / 2.0).unwrap();
        let c = lhs_partial_gamma_log_d(&p, h / 4.0).unwrap();
        let slope = ((a - b).norm() / (b - c).norm()).log2();
        assert!(slope >= 1.8, "slope {slope}");
        assert!(lhs_partial_gamma_log_d(&p, 1e-1).is_err());
    }

    #[test]
    fn gamma_sum_matches_log_gamma_difference() {
        let p = pr(7, 0.5, C64::new(1.0, 0.3));
        let h = 1e-4;
        let sum = |g: C64| -> C64 {
            (0..7)
                .map(|j| crate::special::log_gamma(g * 0.5 + j as f64 + 1.0).unwrap() - g * 0.5 * 7f64.ln())
                .sum()
        };
        let fd = (sum(p.gamma + h) - sum(p.gamma - h)) / (2.0 * h);
        let t7: C64 = gamma_sum_term::<f64>(&p).unwrap();
        assert!((fd - t7).norm() < 1e-9, "{fd} {t7}");
    }

    #[test]
    fn sine_free_correction_at_gamma_two() {
        let p = pr(6, 0.5, C64::new(2.0, 0.0));
        let r = rhs_differential_identity(&p, true).unwrap();
        assert!(r.limit_check.unwrap().max_rel_disagreement < 1e-8);
    }

    #[test]
    fn approach_differences_shrink() {
        let p = pr(6, 0.5, C64::new(1.0, 0.0));
        let (cp, cq) = cauchy_limit_terms(&p).unwrap();
        let c = check_cauchy_limits(&p, LimitPair { p_limit: cp, q_limit: cq }).unwrap();
        assert!(c.max_rel_disagreement < LIMIT_AGREE_TOL, "{c:?}");
        for w in c.approach_differences.windows(2) {
            assert!(w[1] * 1.5 <= w[0], "{:?}", c.approach_differences);
        }
    }
}
