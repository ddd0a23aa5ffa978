//! The symbol f, the zero-phase curve Σ, and Laurent coefficients
//! c_m = ∮ w^{−m} f(w) dw/(2πiw) over contours enclosing the cut [0, x].

use crate::cplx::{cis, cr, from_c64, to_c64, CExt, C, C64};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::real::Real;
use crate::special::hyp1f1;

/// Points closer than this to [0, x] are treated as lying on the cut.
pub const CUT_GUARD: f64 = 1e-14;

/// Distance from w to the segment [0, x].
pub fn dist_to_cut(w: C64, x: f64) -> f64 {
    let t = w.re.clamp(0.0, x);
    (w - C64::new(t, 0.0)).norm()
}

/// f(w) = w^{−γ/2} (w−x)^{γ/2} e^{−Nxw}, principal branches.
pub fn eval_f<T: Real>(w: C<T>, p: &ModelParams) -> Result<C<T>> {
    if dist_to_cut(to_c64(w), p.x) < CUT_GUARD {
        return Err(Error::Domain(format!("f evaluated on its branch cut at {}", to_c64(w))));
    }
    Ok(f_unchecked(w, p))
}

/// f without the cut guard, for callers that already stay off [0, x].
#[inline]
pub fn f_unchecked<T: Real>(w: C<T>, p: &ModelParams) -> C<T> {
    let hg = p.half_gamma::<T>();
    let x = p.x_t::<T>();
    let nx = p.n_t::<T>() * x;
    (hg * ((w - cr(x)).cln() - w.cln()) - w * nx).cexp()
}

/// ℓ = log x − x².
pub fn ell<T: Real>(x: T) -> T {
    x.ln() - x * x
}

/// xw + ℓ − Log w. Its real part vanishes on Σ, is positive inside and
/// negative on the unit circle.
pub fn phase<T: Real>(w: C<T>, x: T) -> Result<C<T>> {
    if w.im == T::zero() && w.re <= T::zero() {
        return Err(Error::Domain(format!("phase evaluated on (-inf, 0] at {}", to_c64(w))));
    }
    Ok(w * x + cr(ell(x)) - w.cln())
}

/// Whether w lies in the region enclosed by Σ. Σ lies in the unit disk, and
/// Re(xw + ℓ − Log w) is also positive far to the right, so both tests are needed.
pub fn in_sigma_interior(w: C64, x: f64) -> bool {
    if w.norm() == 0.0 {
        return true;
    }
    w.norm() < 1.0 && (w * x + C64::new(ell(x), 0.0) - w.ln()).re > 0.0
}

/// Leftmost point u₀ < 0 of Σ: the root of x(u−x) + log x − log|u| on [−1, −10⁻¹²].
pub fn sigma_leftmost(x: f64) -> Result<f64> {
    let g = |u: f64| x * (u - x) + x.ln() - (-u).ln();
    let (mut a, mut b) = (-1.0f64, -1e-12f64);
    let (ga, gb) = (g(a), g(b));
    if ga.signum() == gb.signum() {
        return Err(Error::Accuracy { op: "sigma leftmost bracket", residual: ga.abs().min(gb.abs()) });
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if g(m).signum() == ga.signum() {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Polar radius of Σ at angle θ: the root of log r − log x − x(r cos θ − x) in (0, 1).
pub fn sigma_radius<T: Real>(x: T, theta: T) -> T {
    let ct = theta.cos();
    let lx = x.ln();
    let mut r = x;
    for _ in 0..60 {
        let g = r.ln() - lx - x * (r * ct - x);
        let dg = T::one() / r - x * ct;
        let dr = g / dg;
        let mut nr = r - dr;
        if nr <= T::zero() {
            nr = r * T::from_f64(0.5);
        }
        r = nr;
        if dr.abs().to_f64() < 1e-33 * r.to_f64().max(1e-300) + 1e-300 {
            break;
        }
    }
    r
}

/// Point of Σ at polar angle θ and its derivative dw/dθ.
pub fn sigma_point<T: Real>(x: T, theta: T) -> (C<T>, C<T>) {
    let r = sigma_radius(x, theta);
    let (s, co) = theta.sin_cos();
    let dr = -x * r * s / (T::one() / r - x * co);
    let e = cis(theta);
    (e * r, e * C::new(dr, r))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaSample {
    pub w: C64,
    /// Unit tangent in the counter-clockwise direction.
    pub tangent: C64,
}

/// m points of Σ, counter-clockwise from x, equally spaced in polar angle.
/// For even m the list contains x (θ = 0) and the leftmost point u₀ (θ = π).
pub fn build_sigma(x: f64, m: usize) -> Result<Vec<SigmaSample>> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Parameter(format!("x must lie in (0, 1), got {x}")));
    }
    let u0 = sigma_leftmost(x)?;
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let mut th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        if th > std::f64::consts::PI {
            th -= 2.0 * std::f64::consts::PI;
        }
        let (mut w, dw) = sigma_point::<f64>(x, th);
        if 2 * j == m {
            w = C64::new(u0, 0.0);
        }
        if j == 0 {
            w = C64::new(x, 0.0);
        }
        out.push(SigmaSample { w, tangent: dw / dw.norm() });
    }
    Ok(out)
}

/// A circle used as integration contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
}

impl ContourSpec {
    /// Circle centred at x/2.
    pub fn centered(x: f64, radius: f64, nodes: usize) -> Self {
        ContourSpec { center: C64::new(x / 2.0, 0.0), radius, nodes }
    }

    /// The disk must strictly contain [0, x].
    pub fn check(&self, x: f64) -> Result<()> {
        let ok = self.center.norm() < self.radius
            && (self.center - C64::new(x, 0.0)).norm() < self.radius
            && self.nodes.is_power_of_two();
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "contour (center {}, radius {}, {} nodes) does not admissibly enclose [0, {}]",
                self.center, self.radius, self.nodes, x
            )))
        }
    }
}

pub const NODES_START: usize = 256;
pub const NODES_CAP: usize = 65536;

/// How the coefficients were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentRoute {
    /// Trapezoidal rule on a circle.
    Trapezoid,
    /// Confluent hypergeometric closed form.
    ClosedForm,
}

/// c_m for m ∈ [−n, n].
#[derive(Debug, Clone)]
pub struct ContourMoments<T: Real> {
    pub params: ModelParams,
    pub n: usize,
    pub c: Vec<C<T>>,
    pub radius_used: f64,
    pub route: MomentRoute,
    pub nodes_used: usize,
}

impl<T: Real> ContourMoments<T> {
    #[inline]
    pub fn get(&self, m: i64) -> C<T> {
        self.c[(m + self.n as i64) as usize]
    }
}

fn trapezoid_pass<T: Real>(p: &ModelParams, n: usize, spec: &ContourSpec, nodes: usize) -> Vec<C<T>> {
    let a: C<T> = from_c64(spec.center);
    let rad = T::from_f64(spec.radius);
    let two_pi = T::pi() * T::from_f64(2.0);
    let mut acc = vec![C::new(T::zero(), T::zero()); 2 * n + 1];
    let inv_m = T::one() / T::from_f64(nodes as f64);
    for k in 0..nodes {
        let e = cis(two_pi * T::from_f64(k as f64) * inv_m);
        let w = a + e * rad;
        // f(w)·(dw/dθ)/(2πi w) dθ → f(w)·R e^{iθ}/w per node.
        let base = f_unchecked(w, p) * e * rad / w;
        let winv = C::new(T::one(), T::zero()) / w;
        // m = 0 … n: multiply by w^{−m}; m = −1 … −n: multiply by w^{|m|}.
        let mut t = base;
        for m in 0..=n {
            acc[n + m] = acc[n + m] + t;
            t = t * winv;
        }
        let mut t = base * w;
        for m in 1..=n {
            acc[n - m] = acc[n - m] + t;
            t = t * w;
        }
    }
    acc.into_iter().map(|z| z * inv_m).collect()
}

/// Trapezoidal extraction on a circle, doubling nodes from 256 until two
/// passes agree to 1e−12 in the ρ-balanced max-norm (ρ = circle radius).
pub fn laurent_coefficients<T: Real>(p: &ModelParams, n: usize, spec: &ContourSpec) -> Result<ContourMoments<T>> {
    spec.check(p.x)?;
    let rho = spec.radius;
    let bal = |v: &[C<T>]| -> Vec<f64> {
        v.iter().enumerate().map(|(i, z)| z.cabs().to_f64() * rho.powi(i as i32 - n as i32)).collect()
    };
    let tol = if T::DIGITS > 20 { 1e-26 } else { 1e-12 };
    let mut nodes = spec.nodes.max(NODES_START);
    let mut prev = trapezoid_pass::<T>(p, n, spec, nodes);
    let mut achieved = f64::INFINITY;
    while nodes < NODES_CAP {
        nodes *= 2;
        let cur = trapezoid_pass::<T>(p, n, spec, nodes);
        let scale = bal(&cur).into_iter().fold(0.0f64, f64::max);
        let diff: Vec<C<T>> = cur.iter().zip(&prev).map(|(a, b)| *a - *b).collect();
        let d = bal(&diff).into_iter().fold(0.0f64, f64::max);
        achieved = d / scale;
        prev = cur;
        if achieved <= tol {
            return Ok(ContourMoments { params: *p, n, c: prev, radius_used: rho, route: MomentRoute::Trapezoid, nodes_used: nodes });
        }
    }
    Err(Error::Accuracy { op: "trapezoidal Laurent coefficients", residual: achieved })
}

/// Closed form of c_m. With a = γ/2 and z = Nx²:
/// c_m = (−Nx)^m/m! · e^{−z} ₁F₁(m+1+a; m+1; z) for m ≥ 0, and
/// c_{−n} = (−x)^n binom(a, n) e^{−z} ₁F₁(1+a; n+1; z) for n ≥ 1.
pub fn closed_form_coefficient<T: Real>(p: &ModelParams, m: i64) -> Result<C<T>> {
    let a = p.half_gamma::<T>();
    let x = p.x_t::<T>();
    let nn = p.n_t::<T>();
    let z = nn * x * x;
    let one = cr(T::one());
    let ez = (-z).exp();
    if m >= 0 {
        let mut pre = cr(T::one());
        for i in 1..=m {
            pre = pre * (-nn * x / T::from_f64(i as f64));
        }
        let mm = cr(T::from_f64(m as f64));
        Ok(pre * hyp1f1(mm + one + a, mm + one, cr(z))? * ez)
    } else {
        let k = -m;
        let mut pre = cr(T::one());
        for i in 0..k {
            let fi = T::from_f64(i as f64);
            pre = pre * (a - fi) * (-x) / (fi + T::one());
        }
        if pre.cabs() == T::zero() {
            return Ok(pre);
        }
        Ok(pre * hyp1f1(one + a, cr(T::from_f64((k + 1) as f64)), cr(z))? * ez)
    }
}

pub fn closed_form_moments<T: Real>(p: &ModelParams, n: usize) -> Result<ContourMoments<T>> {
    let mut cs = Vec::with_capacity(2 * n + 1);
    for m in -(n as i64)..=(n as i64) {
        cs.push(closed_form_coefficient::<T>(p, m)?);
    }
    Ok(ContourMoments { params: *p, n, c: cs, radius_used: f64::NAN, route: MomentRoute::ClosedForm, nodes_used: 0 })
}

/// Balancing radius: minimises max_m |ρ^m c_m| / min_m |ρ^m c_m| over a
/// log-spaced grid above x/2. Exactly vanishing coefficients are skipped.
pub fn choose_radius(p: &ModelParams, n: usize) -> f64 {
    let fallback = p.x / 2.0 + 0.25;
    let cm = match closed_form_moments::<f64>(p, n) {
        Ok(m) => m,
        Err(_) => return fallback,
    };
    let logs: Vec<(f64, f64)> = (-(n as i64)..=n as i64)
        .filter_map(|m| {
            let v = cm.get(m).norm();
            (v > 0.0 && v.is_finite()).then(|| (m as f64, v.ln()))
        })
        .collect();
    if logs.len() < 2 {
        return fallback;
    }
    let lo = (p.x / 2.0 + 0.02).ln();
    let hi = 8.0f64.ln();
    let steps = 120;
    let mut best = (f64::INFINITY, fallback);
    for i in 0..=steps {
        let rho = (lo + (hi - lo) * i as f64 / steps as f64).exp();
        let lr = rho.ln();
        let (mut mx, mut mn) = (f64::NEG_INFINITY, f64::INFINITY);
        for &(m, lv) in &logs {
            let b = lv + m * lr;
            mx = mx.max(b);
            mn = mn.min(b);
        }
        let spread = mx - mn;
        if spread.is_finite() && spread < best.0 {
            best = (spread, rho);
        }
    }
    best.1
}

/// log10 of max/min balanced magnitude, for reporting.
pub fn balanced_spread(cm: &ContourMoments<f64>, rho: f64) -> f64 {
    let (mut mx, mut mn) = (f64::NEG_INFINITY, f64::INFINITY);
    for m in -(cm.n as i64)..=cm.n as i64 {
        let v = cm.get(m).norm();
        if v > 0.0 {
            let b = v.log10() + m as f64 * rho.log10();
            mx = mx.max(b);
            mn = mn.min(b);
        }
    }
    mx - mn
}

/// A radius for trapezoidal extraction: comfortably outside the cut, with
/// the e^{−Nxw} growth on the circle kept moderate.
pub fn default_circle(p: &ModelParams) -> ContourSpec {
    let r = p.x / 2.0 + 0.3;
    ContourSpec::centered(p.x, r, NODES_START)
}
