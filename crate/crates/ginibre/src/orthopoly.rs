//! Biorthogonal pairs (p_j, q_j) for the pairing ∮ · f(w) dw/(2πiw), the
//! Riemann–Hilbert matrix Y built from them, and the identity checks tying
//! them together.
//!
//! Conventions: p_j(w) = Σ a_i w^i with a_j = χ_j, and q_j is stored by its
//! coefficients d_i in powers of u = w⁻¹ with d_j = χ̂_j. With the Toeplitz
//! matrix T_{ki} = c_{k−i} and ν_j = N^{1+γ/2+j}/(πΓ(1+γ/2+j)),
//!   T a = (ν_j/χ_j) e_j   and   Tᵀ d = e_j/χ_j.

use crate::cauchy::{cauchy_transform, LPoly};
use crate::contours::{build_sigma, closed_form_coefficient, closed_form_moments, dist_to_cut, eval_f, sigma_leftmost, ContourMoments};
use crate::cplx::{from_c64, to_c64, CExt, C, C64};
use crate::error::{Error, Result};
use crate::linalg::{lu, Mat2};
use crate::logc::LogComplex;
use crate::moments::{singular_threshold, ToeplitzSystem};
use crate::params::ModelParams;
use crate::real::Real;
use crate::rng::Philox;
use crate::special::log_gamma;

#[derive(Debug, Clone)]
pub struct BiorthPair<T: Real> {
    pub j: usize,
    /// Coefficients of p_j in ascending powers of w.
    pub p: Vec<C<T>>,
    /// Coefficients of q_j in ascending powers of w⁻¹.
    pub q: Vec<C<T>>,
    pub chi: LogComplex<T>,
    pub chi_hat: LogComplex<T>,
    /// Coefficient of w^{j−1} in p_j (zero for j = 0).
    pub kappa: C<T>,
    /// log D̂_j of the system that produced the pair.
    pub log_dhat: LogComplex<T>,
}

fn horner<T: Real>(c: &[C<T>], z: C<T>) -> C<T> {
    c.iter().rev().fold(C::new(T::zero(), T::zero()), |acc, a| acc * z + *a)
}

fn horner_deriv<T: Real>(c: &[C<T>], z: C<T>) -> C<T> {
    let mut acc = C::new(T::zero(), T::zero());
    for (i, a) in c.iter().enumerate().skip(1).rev() {
        acc = acc * z + *a * T::from_f64(i as f64);
    }
    acc
}

impl<T: Real> BiorthPair<T> {
    pub fn eval_p(&self, w: C<T>) -> C<T> {
        horner(&self.p, w)
    }

    /// q_j evaluated at its own variable u (so q_j(w⁻¹) is `eval_q(1/w)`).
    pub fn eval_q(&self, u: C<T>) -> C<T> {
        horner(&self.q, u)
    }

    pub fn dp(&self, w: C<T>) -> C<T> {
        horner_deriv(&self.p, w)
    }

    /// d/dw of q_j(w⁻¹).
    pub fn dq_of_inverse(&self, w: C<T>) -> C<T> {
        let u = C::new(T::one(), T::zero()) / w;
        -horner_deriv(&self.q, u) * u * u
    }

    pub fn chi_c(&self) -> C<T> {
        self.chi.to_complex()
    }

    pub fn chi_hat_c(&self) -> C<T> {
        self.chi_hat.to_complex()
    }
}

/// log ν_j = (1+γ/2+j) log N − log π − log Γ(1+γ/2+j).
pub fn log_nu<T: Real>(p: &ModelParams, j: usize) -> Result<C<T>> {
    let s = p.half_gamma::<T>() + T::one() + T::from_f64(j as f64);
    Ok(s * p.n_t::<T>().ln() - log_gamma(s)? - T::pi().ln())
}

/// Factors the balanced (j+1)-block; returns (LU, ρ, log D̂_j).
fn factor_block<T: Real>(cm: &ContourMoments<T>, size: usize, rho: f64) -> Result<(crate::linalg::Lu<T>, LogComplex<T>)> {
    let sys = ToeplitzSystem::new(cm.clone(), size, Some(rho));
    let f = lu(&sys.matrix());
    f.check(singular_threshold::<T>())?;
    let ld = f.log_det();
    Ok((f, ld))
}

/// Balancing radius for the pair solves: the coefficient range the pairs see
/// is |m| ≤ j, so the moments module's choice applies unchanged.
fn pair_radius(p: &ModelParams, j: usize) -> f64 {
    crate::contours::choose_radius(p, j.max(1))
}

/// Solves for (p_j, q_j) from moments covering |m| ≤ j.
pub fn solve_biorth_with<T: Real>(p: &ModelParams, j: usize, cm: &ContourMoments<T>) -> Result<BiorthPair<T>> {
    if cm.n < j {
        return Err(Error::Parameter(format!("moments up to {} needed, have {}", j, cm.n)));
    }
    let rho = pair_radius(p, j);
    let (f, ld) = factor_block(cm, j + 1, rho)?;
    let ld_prev = if j == 0 { LogComplex::one() } else { factor_block(cm, j, rho)?.1 };
    let lnu = log_nu::<T>(p, j)?;
    // χ_j = (D_{j−1}/D_j)^{1/2}, principal root, with D_j/D_{j−1} = (D̂_j/D̂_{j−1})/ν_j.
    let chi = (ld_prev / ld * LogComplex::from_log(lnu)).sqrt();
    let chi_hat = chi / LogComplex::from_log(lnu);
    let n = j + 1;
    let rho_t = T::from_f64(rho);
    let zero = C::new(T::zero(), T::zero());
    // Balanced system D T D⁻¹ with D = diag(ρ^r).
    let mut e = vec![zero; n];
    e[j] = C::new(rho_t.powi(j as i32), T::zero());
    let y = f.solve(&e);
    let scale_p = (LogComplex::from_log(lnu) / chi).to_complex();
    let pc: Vec<C<T>> = y.iter().enumerate().map(|(i, v)| *v * rho_t.powi(-(i as i32)) * scale_p).collect();
    let mut et = vec![zero; n];
    et[j] = C::new(rho_t.powi(-(j as i32)), T::zero());
    let z = f.solve_transpose(&et);
    let inv_chi = chi.inv().to_complex();
    let qc: Vec<C<T>> = z.iter().enumerate().map(|(i, v)| *v * rho_t.powi(i as i32) * inv_chi).collect();
    let kappa = if j == 0 { zero } else { pc[j - 1] };
    Ok(BiorthPair { j, p: pc, q: qc, chi, chi_hat, kappa, log_dhat: ld })
}

/// Pairs 0..=jmax from closed-form moments.
pub fn biorth_family<T: Real>(p: &ModelParams, jmax: usize) -> Result<(Vec<BiorthPair<T>>, ContourMoments<T>)> {
    let cm = closed_form_moments::<T>(p, jmax + 2)?;
    let pairs = (0..=jmax).map(|j| solve_biorth_with(p, j, &cm)).collect::<Result<Vec<_>>>()?;
    Ok((pairs, cm))
}

pub fn solve_biorth<T: Real>(p: &ModelParams, j: usize) -> Result<BiorthPair<T>> {
    let cm = closed_form_moments::<T>(p, j + 2)?;
    solve_biorth_with(p, j, &cm)
}

/// Orthogonality residuals of one pair against a set of moments.
#[derive(Debug, Clone, Copy, Default)]
pub struct OrthoResidual {
    /// max_{k<j} |∮ p_j w^{−k} f| / |ν_j/χ_j|.
    pub p_offdiag: f64,
    /// |∮ p_j w^{−j} f − ν_j/χ_j| / |ν_j/χ_j|.
    pub p_diag: f64,
    /// max_{k<j} |∮ w^k q_j(w⁻¹) f| · |χ_j|.
    pub q_offdiag: f64,
    pub q_diag: f64,
    /// |lead(p) − χ_j|/|χ_j|.
    pub lead_p: f64,
    /// |lead(q) − χ̂_j|/|χ̂_j|.
    pub lead_q: f64,
}

pub fn ortho_residual<T: Real>(pair: &BiorthPair<T>, p: &ModelParams, cm: &ContourMoments<T>) -> Result<OrthoResidual> {
    let j = pair.j;
    let nu = LogComplex::from_log(log_nu::<T>(p, j)?);
    let diag_p = (nu / pair.chi).to_complex();
    let diag_q = pair.chi.inv().to_complex();
    let mut r = OrthoResidual::default();
    for k in 0..=j {
        let bp = (0..=j).fold(C::new(T::zero(), T::zero()), |a, i| a + pair.p[i] * cm.get(k as i64 - i as i64));
        let bq = (0..=j).fold(C::new(T::zero(), T::zero()), |a, i| a + pair.q[i] * cm.get(i as i64 - k as i64));
        if k < j {
            r.p_offdiag = r.p_offdiag.max((bp.cabs() / diag_p.cabs()).to_f64());
            r.q_offdiag = r.q_offdiag.max((bq.cabs() / diag_q.cabs()).to_f64());
        } else {
            r.p_diag = ((bp - diag_p).cabs() / diag_p.cabs()).to_f64();
            r.q_diag = ((bq - diag_q).cabs() / diag_q.cabs()).to_f64();
        }
    }
    let chi = pair.chi_c();
    let chi_hat = pair.chi_hat_c();
    r.lead_p = ((pair.p[j] - chi).cabs() / chi.cabs()).to_f64();
    r.lead_q = ((pair.q[j] - chi_hat).cabs() / chi_hat.cabs()).to_f64();
    Ok(r)
}

/// Residuals of the four three-term relations between degrees n and n+1.
#[derive(Debug, Clone, Copy, Default)]
pub struct RecurrenceResidual {
    pub rec1: f64,
    pub rec2: f64,
    pub rec3: f64,
    pub rec4: f64,
}

/// Deterministic sample points r e^{iθ}, r ∈ [0.4, 1.4].
pub fn probe_points(count: usize, seed: u64) -> Vec<C64> {
    let mut g = Philox::for_sample(seed, 0);
    (0..count)
        .map(|_| {
            let r = 0.4 + g.next_f64();
            let th = 2.0 * std::f64::consts::PI * g.next_f64();
            C64::from_polar(r, th)
        })
        .collect()
}

fn rel<T: Real>(terms: &[C<T>]) -> f64 {
    let sum = terms.iter().fold(C::new(T::zero(), T::zero()), |a, t| a + *t);
    let scale = terms.iter().fold(T::zero(), |a, t| a.max(t.cabs()));
    if scale == T::zero() {
        0.0
    } else {
        (sum.cabs() / scale).to_f64()
    }
}

pub fn verify_recurrences<T: Real>(pn: &BiorthPair<T>, pn1: &BiorthPair<T>, points: &[C64]) -> RecurrenceResidual {
    let n = pn.j as i32;
    let one = C::new(T::one(), T::zero());
    let (chi_n, chih_n) = (pn.chi_c(), pn.chi_hat_c());
    let (chi_1, chih_1) = (pn1.chi_c(), pn1.chi_hat_c());
    let p1_0 = pn1.p[0];
    let q1_0 = pn1.q[0];
    let mut r = RecurrenceResidual::default();
    for &w64 in points {
        let w: C<T> = from_c64(w64);
        let u = one / w;
        let (pw, p1w) = (pn.eval_p(w), pn1.eval_p(w));
        let (qu, q1u) = (pn.eval_q(u), pn1.eval_q(u));
        let r1 = rel(&[chih_n * w * pw, -(chih_1 * p1w), p1_0 * w.cpowi(n + 1) * q1u]);
        let r2 = rel(&[chi_n * u * qu, -(chi_1 * q1u), q1_0 * w.cpowi(-n - 1) * p1w]);
        let r3 = rel(&[chih_1 * u * qu, -(chih_n * q1u), q1_0 * (chih_n / chi_n) * w.cpowi(-n) * pw]);
        r.rec1 = r.rec1.max(r1);
        r.rec2 = r.rec2.max(r2);
        r.rec3 = r.rec3.max(r3);
    }
    r.rec4 = rel(&[chi_n * chih_n, -(chi_1 * chih_1), p1_0 * q1_0]);
    r
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CdResidual {
    pub cd1: f64,
    pub cd2: f64,
}

/// Christoffel–Darboux residuals using pairs 0..=n.
pub fn verify_christoffel_darboux<T: Real>(pairs: &[BiorthPair<T>], points: &[C64], seconds: &[C64]) -> CdResidual {
    let n = pairs.len() - 1;
    let pn = &pairs[n];
    let one = C::new(T::one(), T::zero());
    let mut r = CdResidual::default();
    for (&w64, &u64_) in points.iter().zip(seconds) {
        let w: C<T> = from_c64(w64);
        let u: C<T> = from_c64(u64_);
        let (wi, ui) = (one / w, one / u);
        let sum_wu = pairs[..n].iter().fold(C::new(T::zero(), T::zero()), |a, pk| a + pk.eval_p(w) * pk.eval_q(ui));
        let lhs = (one - ui * w) * sum_wu;
        let t1 = u.cpowi(-(n as i32)) * pn.eval_p(u) * w.cpowi(n as i32) * pn.eval_q(wi);
        let t2 = pn.eval_p(w) * pn.eval_q(ui);
        r.cd1 = r.cd1.max(rel(&[lhs, -t1, t2]));
        let sum_ww = pairs[..n].iter().fold(C::new(T::zero(), T::zero()), |a, pk| a + pk.eval_p(w) * pk.eval_q(wi));
        let pw = pn.eval_p(w);
        let qw = pn.eval_q(wi);
        let a = pw * qw * T::from_f64(n as f64);
        let b = w * qw * pn.dp(w);
        let c = w * pw * pn.dq_of_inverse(w);
        r.cd2 = r.cd2.max(rel(&[sum_ww, a, -b, c]));
    }
    r
}

/// Y_j(w) for j ≥ 1.
#[derive(Debug, Clone)]
pub struct YMatrix<T: Real> {
    pub params: ModelParams,
    pub j: usize,
    pub pj: BiorthPair<T>,
    pub qprev: BiorthPair<T>,
    pub moments: ContourMoments<T>,
    g12: LPoly<T>,
    g22: LPoly<T>,
    origin: OriginSeries<T>,
}

/// Taylor coefficients at 0 of Y₁₂ and Y₂₂. Inside the disk |w| < |u₀|
/// (u₀ the leftmost point of Σ) the Cauchy transforms expand as
/// Σ_n w^n Σ_m g_m c_{n−m}; the moment split used elsewhere cancels
/// catastrophically there because it carries w^{−j−1}.
#[derive(Debug, Clone)]
struct OriginSeries<T: Real> {
    radius: f64,
    y12: Vec<C<T>>,
    y22: Vec<C<T>>,
}

/// Fraction of |u₀| within which the origin series is used.
pub const ORIGIN_FRACTION: f64 = 0.5;

fn origin_terms<T: Real>() -> usize {
    if T::DIGITS > 20 {
        120
    } else {
        64
    }
}

fn origin_series<T: Real>(p: &ModelParams, pj: &BiorthPair<T>, qprev: &BiorthPair<T>, cm: &ContourMoments<T>) -> Result<OriginSeries<T>> {
    let j = pj.j as i64;
    let terms = origin_terms::<T>();
    let top = j + terms as i64 + 1;
    // c_m for 0 ≤ m ≤ top.
    let cpos = (0..=top)
        .map(|m| if (m as usize) <= cm.n { Ok(cm.get(m)) } else { closed_form_coefficient::<T>(p, m) })
        .collect::<Result<Vec<_>>>()?;
    let zero = C::new(T::zero(), T::zero());
    let inv_chi = pj.chi.inv().to_complex();
    let chi_prev = qprev.chi_c();
    let mut y12 = Vec::with_capacity(terms);
    let mut y22 = Vec::with_capacity(terms);
    for n in 0..terms as i64 {
        // G₁₂ = Σ_i a_i s^{i−j}: c_{n+j−i}. G₂₂ = Σ_i d_i s^{−1−i}: c_{n+1+i}.
        let a = pj.p.iter().enumerate().fold(zero, |acc, (i, a)| acc + *a * cpos[(n + j - i as i64) as usize]);
        let d = qprev.q.iter().enumerate().fold(zero, |acc, (i, d)| acc + *d * cpos[(n + 1 + i as i64) as usize]);
        y12.push(a * inv_chi);
        y22.push(-(d * chi_prev));
    }
    let radius = ORIGIN_FRACTION * sigma_leftmost(p.x)?.abs();
    Ok(OriginSeries { radius, y12, y22 })
}

fn eval_series<T: Real>(c: &[C<T>], w: C<T>) -> C<T> {
    c.iter().rev().fold(C::new(T::zero(), T::zero()), |acc, a| acc * w + *a)
}

/// Minimum distance from the cut for Y evaluation.
pub const Y_CUT_GUARD: f64 = 1e-8;

pub fn assemble_y<T: Real>(p: &ModelParams, j: usize) -> Result<YMatrix<T>> {
    if j == 0 {
        return Err(Error::Parameter("Y is defined for degree j >= 1".into()));
    }
    let cm = closed_form_moments::<T>(p, j + 3)?;
    let pj = solve_biorth_with(p, j, &cm)?;
    let qprev = solve_biorth_with(p, j - 1, &cm)?;
    YMatrix::from_pairs(p, pj, qprev, cm)
}

impl<T: Real> YMatrix<T> {
    pub fn from_pairs(p: &ModelParams, pj: BiorthPair<T>, qprev: BiorthPair<T>, moments: ContourMoments<T>) -> Result<Self> {
        let j = pj.j;
        let g12 = LPoly::from_poly(&pj.p, -(j as i64));
        let g22 = LPoly::from_inverse_poly(&qprev.q, -1);
        let origin = origin_series(p, &pj, &qprev, &moments)?;
        Ok(YMatrix { params: *p, j, pj, qprev, moments, g12, g22, origin })
    }

    pub fn eval(&self, w: C<T>) -> Result<Mat2<T>> {
        let w64 = to_c64(w);
        if dist_to_cut(w64, self.params.x) < Y_CUT_GUARD {
            return Err(Error::NearContour(w64));
        }
        let chi = self.pj.chi_c();
        let chi_prev = self.qprev.chi_c();
        let y11 = self.pj.eval_p(w) / chi;
        // w^{j−1}q_{j−1}(1/w) as a polynomial in w.
        let y21 = -(chi_prev * self.qprev.q.iter().fold(C::new(T::zero(), T::zero()), |acc, d| acc * w + *d));
        if w64.norm() < self.origin.radius {
            let y12 = eval_series(&self.origin.y12, w);
            let y22 = eval_series(&self.origin.y22, w);
            return Ok(Mat2::new(y11, y12, y21, y22));
        }
        let y12 = cauchy_transform(&self.g12, w, &self.params, &self.moments)? / chi;
        let y22 = -(chi_prev * cauchy_transform(&self.g22, w, &self.params, &self.moments)?);
        Ok(Mat2::new(y11, y12, y21, y22))
    }

    /// Y₂₁ at the origin: −χ_{j−1}·(coefficient of w^{j−1} in w^{j−1}q_{j−1}(w⁻¹)).
    pub fn y21_at_zero(&self) -> C<T> {
        -(self.qprev.chi_c() * self.qprev.q[self.j - 1])
    }

    /// The 1/w coefficients of w^{−j}Y₁₁ and w^{j}Y₂₂.
    pub fn inverse_power_terms(&self) -> (C<T>, C<T>) {
        let a = self.pj.kappa / self.pj.chi_c();
        let j = self.j as i64;
        // μ = ∮ s^{j} q_{j−1}(s⁻¹) f ds/(2πis) = Σ_i d_i c_{i−j}.
        let mu = self.qprev.q.iter().enumerate().fold(C::new(T::zero(), T::zero()), |acc, (i, d)| acc + *d * self.moments.get(i as i64 - j));
        (a, self.qprev.chi_c() * mu)
    }
}

/// Jump residuals of Y across Σ.
#[derive(Debug, Clone, Copy, Default)]
pub struct JumpReport {
    /// max entry of Y₋⁻¹Y₊ − J at normal offset ε.
    pub raw: f64,
    /// The same at offset ε/2.
    pub raw_half: f64,
    /// max entry of 2M(ε/2) − M(ε) − J, the O(ε) offset error removed.
    pub extrapolated: f64,
    /// max |[Y₋⁻¹Y₊]₂₁| after the same extrapolation.
    pub entry21: f64,
}

fn jump_product<T: Real>(y: &YMatrix<T>, w: C64, outward: C64, eps: f64) -> Result<Mat2<T>> {
    let yp = y.eval(from_c64(w - outward * eps))?;
    let ym = y.eval(from_c64(w + outward * eps))?;
    Ok(ym.inv() * yp)
}

/// Jump of Y across Σ, with + the side containing the origin and
/// J = [[1, w^{−j}f],[0,1]].
pub fn verify_jump_y<T: Real>(y: &YMatrix<T>, points: &[(C64, C64)], eps: f64) -> Result<JumpReport> {
    let mut r = JumpReport::default();
    let two = T::from_f64(2.0);
    for &(w, tangent) in points {
        let outward = tangent * C64::new(0.0, -1.0);
        let wt: C<T> = from_c64(w);
        let jump = Mat2::upper(wt.cpowi(-(y.j as i32)) * eval_f(wt, &y.params)?);
        let m1 = jump_product(y, w, outward, eps)?;
        let m2 = jump_product(y, w, outward, eps / 2.0)?;
        let d1 = m1 - jump;
        let d2 = m2 - jump;
        let ex = Mat2::new(m2.a * two - m1.a, m2.b * two - m1.b, m2.c * two - m1.c, m2.d * two - m1.d) - jump;
        r.raw = r.raw.max(d1.max_abs().to_f64());
        r.raw_half = r.raw_half.max(d2.max_abs().to_f64());
        r.extrapolated = r.extrapolated.max(ex.max_abs().to_f64());
        r.entry21 = r.entry21.max(ex.c.cabs().to_f64());
    }
    Ok(r)
}

/// Points of Σ at least `clearance` away from x, with unit tangents.
pub fn sigma_probe(x: f64, count: usize, clearance: f64) -> Result<Vec<(C64, C64)>> {
    Ok(build_sigma(x, count)?
        .into_iter()
        .filter(|s| (s.w - C64::new(x, 0.0)).norm() >= clearance)
        .map(|s| (s.w, s.tangent))
        .collect())
}
