//! Cauchy transforms ∮_Σ G(s) f(s)/(s−w) ds/(2πi) of Laurent polynomials G.
//!
//! Writing G(s) = s·H(s), the transform splits as
//!   ∮ (H(s)−H(w))/(s−w) · s f(s) ds/(2πi) + H(w)·K₁(w),
//! where the first part is a finite combination of the coefficients c_m and
//! K₁(w) = ∮_Σ s f(s)/(s−w) ds/(2πi) is the only genuine integral. K₁ is
//! evaluated on a circle around [0, x] for distant w and on a stadium hugging
//! the cut otherwise, with the residue w f(w) added whenever Σ and the
//! quadrature contour wind differently around w.

use crate::contours::{dist_to_cut, f_unchecked, in_sigma_interior, ContourMoments};
use crate::cplx::{cis, cr, from_c64, to_c64, CExt, C, C64};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quad::gauss_legendre;
use crate::real::Real;
use crate::special::hyp1f1;

/// Σ_{i} coef[i]·s^{lo+i}.
#[derive(Debug, Clone, PartialEq)]
pub struct LPoly<T: Real> {
    pub lo: i64,
    pub coef: Vec<C<T>>,
}

impl<T: Real> LPoly<T> {
    /// p(s)·s^shift for p given by coefficients in ascending powers of s.
    pub fn from_poly(p: &[C<T>], shift: i64) -> Self {
        LPoly { lo: shift, coef: p.to_vec() }
    }

    /// q(s^{−1})·s^shift for q given by coefficients in ascending powers of s^{−1}.
    pub fn from_inverse_poly(q: &[C<T>], shift: i64) -> Self {
        let deg = q.len() as i64 - 1;
        LPoly { lo: shift - deg, coef: q.iter().rev().copied().collect() }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coef.len() as i64 - 1
    }

    pub fn eval(&self, w: C<T>) -> C<T> {
        let mut acc = C::new(T::zero(), T::zero());
        for c in self.coef.iter().rev() {
            acc = acc * w + *c;
        }
        acc * w.cpowi(self.lo as i32)
    }

    pub fn shifted(&self, k: i64) -> Self {
        LPoly { lo: self.lo + k, coef: self.coef.clone() }
    }
}

/// Largest |m| of c_m needed to transform G.
pub fn moments_needed<T: Real>(g: &LPoly<T>) -> usize {
    let h_lo = g.lo - 1;
    let h_hi = g.hi() - 1;
    (h_lo.abs().max(h_hi.abs()) + 1) as usize
}

/// ∮ (H(s)−H(w))/(s−w)·s f(s) ds/(2πi) with H = G/s.
pub fn divided_part<T: Real>(g: &LPoly<T>, w: C<T>, cm: &ContourMoments<T>) -> Result<C<T>> {
    if moments_needed(g) > cm.n {
        return Err(Error::Parameter(format!("moments up to |m| = {} needed, have {}", moments_needed(g), cm.n)));
    }
    let mut acc = C::new(T::zero(), T::zero());
    for (i, h) in g.coef.iter().enumerate() {
        let a = g.lo - 1 + i as i64;
        if a == 0 {
            continue;
        }
        let mut term = C::new(T::zero(), T::zero());
        if a >= 1 {
            for b in 0..a {
                term = term + w.cpowi((a - 1 - b) as i32) * cm.get(-b - 2);
            }
        } else {
            for b in a..=-1 {
                term = term - w.cpowi((a - 1 - b) as i32) * cm.get(-b - 2);
            }
        }
        acc = acc + *h * term;
    }
    Ok(acc)
}

/// Which contour K₁ was evaluated on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum K1Contour {
    Circle { radius: f64, nodes: usize },
    Stadium { clearance: f64, nodes: usize },
}

/// Radius of the circle used for distant evaluation points.
fn circle_radius(x: f64) -> f64 {
    x / 2.0 + 0.15
}

/// Distance from x/2 beyond which K₁ is integrated on the circle.
pub fn circle_switch_radius(x: f64) -> f64 {
    circle_radius(x) + 0.15
}

/// K₁(w) = ∮_Σ s f(s)/(s−w) ds/(2πi) for w off Σ and off [0, x].
pub fn k1<T: Real>(w: C<T>, p: &ModelParams) -> Result<(C<T>, K1Contour)> {
    let w64 = to_c64(w);
    let x = p.x;
    let d = dist_to_cut(w64, x);
    if d < 1e-12 {
        return Err(Error::NearContour(w64));
    }
    let center = C64::new(x / 2.0, 0.0);
    let rc = circle_radius(x);
    let inside_sigma = in_sigma_interior(w64, x);
    // w always lies outside the quadrature contour, so only Σ's winding counts.
    let (val, how) = if (w64 - center).norm() > circle_switch_radius(x) {
        let (v, nodes) = k1_circle(w, p, rc)?;
        (v, K1Contour::Circle { radius: rc, nodes })
    } else {
        let delta = (d / 2.0).min(0.2);
        let nodes = stadium_rule::<T>(x, delta, w64);
        let mut acc = C::new(T::zero(), T::zero());
        for &(s, ds) in &nodes {
            acc = acc + f_unchecked(s, p) * s * ds / (s - w);
        }
        let two_pi_i = C::new(T::zero(), T::pi() * T::from_f64(2.0));
        (acc / two_pi_i, K1Contour::Stadium { clearance: delta, nodes: nodes.len() })
    };
    if inside_sigma {
        Ok((val + f_unchecked(w, p) * w, how))
    } else {
        Ok((val, how))
    }
}

fn k1_circle<T: Real>(w: C<T>, p: &ModelParams, rc: f64) -> Result<(C<T>, usize)> {
    let a: C<T> = from_c64(C64::new(p.x / 2.0, 0.0));
    let rad = T::from_f64(rc);
    let two_pi = T::pi() * T::from_f64(2.0);
    let tol = if T::DIGITS > 20 { 1e-28 } else { 1e-14 };
    let pass = |m: usize| {
        let inv = T::one() / T::from_f64(m as f64);
        let mut acc = C::new(T::zero(), T::zero());
        let mut scale = T::zero();
        for k in 0..m {
            let e = cis(two_pi * T::from_f64(k as f64) * inv);
            let s = a + e * rad;
            // ds/(2πi) = R e^{iθ} dθ/(2π).
            let term = f_unchecked(s, p) * s / (s - w) * e * rad;
            scale = scale.max(term.cabs());
            acc = acc + term;
        }
        (acc * inv, scale.to_f64())
    };
    let mut m = 128;
    let (mut prev, _) = pass(m);
    let mut diff = f64::INFINITY;
    while m < 65536 {
        m *= 2;
        let (cur, scale) = pass(m);
        // Relative to the integrand size: K₁ vanishes identically when f is entire.
        diff = (cur - prev).cabs().to_f64() / cur.cabs().to_f64().max(scale).max(1e-300);
        prev = cur;
        if diff < tol {
            return Ok((prev, m));
        }
    }
    Err(Error::Accuracy { op: "circle Cauchy transform", residual: diff })
}

fn gl_order<T: Real>() -> usize {
    if T::DIGITS > 20 {
        30
    } else {
        16
    }
}

/// Breakpoints of [lo, hi] so that each panel is no longer than the distance
/// scale `floor + dist(panel, centers)`.
fn graded_breaks(lo: f64, hi: f64, centers: &[f64], floor: f64) -> Vec<f64> {
    let mut out = vec![lo];
    let mut stack = vec![(lo, hi)];
    let mut panels = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let dist = centers
            .iter()
            .map(|&c| if c < a { a - c } else if c > b { c - b } else { 0.0 })
            .fold(f64::INFINITY, f64::min);
        if b - a <= floor + dist || b - a < 1e-15 {
            panels.push((a, b));
        } else {
            let m = 0.5 * (a + b);
            stack.push((a, m));
            stack.push((m, b));
        }
    }
    panels.sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap());
    for (_, b) in panels {
        out.push(b);
    }
    out
}

/// Nodes s and complex weights ds of a counter-clockwise stadium around
/// [0, x] at clearance δ, refined near the branch points and near w.
pub fn stadium_rule<T: Real>(x: f64, delta: f64, w: C64) -> Vec<(C<T>, C<T>)> {
    let (gx, gw) = gauss_legendre::<T>(gl_order::<T>());
    let half = T::from_f64(0.5);
    let mut out = Vec::new();
    let mut centers = vec![0.0, x];
    if w.re > 0.0 && w.re < x {
        centers.push(w.re);
    }
    let breaks = graded_breaks(0.0, x, &centers, delta);
    let dl = T::from_f64(delta);
    // Bottom segment, left to right.
    for win in breaks.windows(2) {
        let (a, b) = (T::from_f64(win[0]), T::from_f64(win[1]));
        let (mid, rad) = ((a + b) * half, (b - a) * half);
        for (t, wt) in gx.iter().zip(&gw) {
            out.push((C::new(mid + rad * *t, -dl), cr(rad * *wt)));
        }
    }
    // Arc around x, from −π/2 to π/2.
    push_arc(&mut out, &gx, &gw, T::from_f64(x), dl, -0.5, 0.5, 4);
    // Top segment, right to left.
    for win in breaks.windows(2).rev() {
        let (a, b) = (T::from_f64(win[0]), T::from_f64(win[1]));
        let (mid, rad) = ((a + b) * half, (b - a) * half);
        for (t, wt) in gx.iter().zip(&gw).rev() {
            out.push((C::new(mid + rad * *t, dl), cr(-(rad * *wt))));
        }
    }
    // Arc around 0, from π/2 to 3π/2.
    push_arc(&mut out, &gx, &gw, T::zero(), dl, 0.5, 1.5, 4);
    out
}

/// Arc c + δe^{iθ}, θ from πa to πb, split into `panels` Gauss–Legendre panels.
#[allow(clippy::too_many_arguments)]
fn push_arc<T: Real>(out: &mut Vec<(C<T>, C<T>)>, gx: &[T], gw: &[T], c: T, delta: T, a: f64, b: f64, panels: usize) {
    let pi = T::pi();
    let half = T::from_f64(0.5);
    for k in 0..panels {
        let t0 = pi * T::from_f64(a + (b - a) * k as f64 / panels as f64);
        let t1 = pi * T::from_f64(a + (b - a) * (k + 1) as f64 / panels as f64);
        let (mid, rad) = ((t0 + t1) * half, (t1 - t0) * half);
        for (t, wt) in gx.iter().zip(gw) {
            let e = cis(mid + rad * *t);
            let s = cr(c) + e * delta;
            let ds = C::new(T::zero(), delta) * e * (rad * *wt);
            out.push((s, ds));
        }
    }
}

/// ∮_Σ G(s) f(s)/(s−w) ds/(2πi).
pub fn cauchy_transform<T: Real>(g: &LPoly<T>, w: C<T>, p: &ModelParams, cm: &ContourMoments<T>) -> Result<C<T>> {
    let dd = divided_part(g, w, cm)?;
    let h = g.shifted(-1).eval(w);
    let (k, _) = k1(w, p)?;
    Ok(dd + h * k)
}

/// lim K₁(z) as z → x from Int(Σ): x(1−γ/2)·e^{−Nx²}·₁F₁(γ/2; 2; Nx²).
///
/// Collapsing the contour onto the cut gives K₁(z) = z f(z) − (sin(πγ/2)/π)
/// ∫₀ˣ t^{1−γ/2}(x−t)^{γ/2}e^{−Nxt}/(t−z) dt; the limit is the analytic
/// continuation of the resulting Beta integral.
pub fn k1_limit_at_x<T: Real>(p: &ModelParams) -> Result<C<T>> {
    let a = p.half_gamma::<T>();
    let x = p.x_t::<T>();
    let z = p.n_t::<T>() * x * x;
    let f = hyp1f1(a, cr(T::from_f64(2.0)), cr(z))?;
    Ok((cr(T::one()) - a) * f * (x * (-z).exp()))
}

/// lim_{z→x, z∈Int(Σ)} ∮_Σ G(s) f(s)/(s−z) ds/(2πi) in closed form.
pub fn cauchy_limit_closed<T: Real>(g: &LPoly<T>, p: &ModelParams, cm: &ContourMoments<T>) -> Result<C<T>> {
    let x = cr(p.x_t::<T>());
    let dd = divided_part(g, x, cm)?;
    let h = g.shifted(-1).eval(x);
    Ok(dd + h * k1_limit_at_x::<T>(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contours::closed_form_moments;
    use crate::dd::Dd;

    fn pr(n: usize, x: f64, g: C64) -> ModelParams {
        ModelParams::new(n, x, g).unwrap()
    }

    #[test]
    fn laurent_poly_eval() {
        let g = LPoly::<f64>::from_inverse_poly(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)], 0);
        let w = C64::new(0.5, 0.5);
        assert!((g.eval(w) - (1.0 + 2.0 / w)).norm() < 1e-15);
        assert_eq!((g.lo, g.hi()), (-1, 0));
    }

    #[test]
    fn far_field_matches_moment_series() {
        // K₁(w) = −Σ_k w^{−k−1} c_{−(k+2)} for |w| beyond the cut.
        let p = pr(5, 0.4, C64::new(1.0, 0.5));
        let cm = closed_form_moments::<f64>(&p, 80).unwrap();
        let w = C64::new(1.2, -0.9);
        let series: C64 = (0..78).map(|k| -w.powi(-(k as i32) - 1) * cm.get(-(k as i64) - 2)).sum();
        let (q, how) = k1(w, &p).unwrap();
        assert!(matches!(how, K1Contour::Circle { .. }));
        assert!((q - series).norm() < 1e-13 * series.norm(), "{q} {series}");
    }

    #[test]
    fn stadium_and_circle_agree_with_residue_bookkeeping() {
        let p = pr(4, 0.5, C64::new(-1.0, 0.0));
        // A point inside Σ: compare with a tighter stadium plus the residue.
        let w = C64::new(0.25, 0.08);
        let (a, _) = k1(w, &p).unwrap();
        let nodes = stadium_rule::<f64>(0.5, 0.02, w);
        let direct: C64 = nodes.iter().map(|&(s, ds)| f_unchecked(s, &p) * s * ds / (s - w)).sum::<C64>() / C64::new(0.0, 2.0 * std::f64::consts::PI);
        let expect = direct + f_unchecked(w, &p) * w;
        assert!((a - expect).norm() < 1e-12 * a.norm(), "{a} {expect}");
    }

    #[test]
    fn extended_stadium_precision() {
        let p = pr(4, 0.5, C64::new(1.0, 0.0));
        let w: C<Dd> = C::new(Dd::from_f64(0.3), Dd::from_f64(0.3));
        let (a, _) = k1(w, &p).unwrap();
        let w64 = C64::new(0.3, 0.3);
        let (b, _) = k1(w64, &p).unwrap();
        assert!((to_c64(a) - b).norm() < 1e-13 * b.norm());
    }

    #[test]
    fn closed_form_limit_matches_approach() {
        for g in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.5, 0.5)] {
            let p = pr(6, 0.5, g);
            let lim = k1_limit_at_x::<f64>(&p).unwrap();
            let dir = C64::from_polar(1.0, 0.75 * std::f64::consts::PI);
            let t = 1e-9;
            let (v, _) = k1(C64::new(0.5, 0.0) + dir * t, &p).unwrap();
            let tol = 50.0 * t.powf((1.0 + 0.5 * g.re).min(1.0)).max(1e-11);
            assert!((v - lim).norm() < tol * lim.norm().max(1.0), "g={g}: {v} vs {lim}");
        }
    }
}
