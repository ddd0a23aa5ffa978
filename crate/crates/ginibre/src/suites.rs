//! Named verification suites. Each runs a family of identity checks over a
//! parameter grid and reports every residual next to its tolerance.

use crate::cauchy::circle_switch_radius;
use crate::contours::{build_sigma, default_circle, dist_to_cut, ell, eval_f, laurent_coefficients, phase, sigma_leftmost, sigma_radius};
use crate::cplx::{from_c64, to_c64, CExt, C, C64};
use crate::dd::Dd;
use crate::diffid::{gamma_sum_term, rhs_differential_identity, LIMIT_AGREE_TOL};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::moments::log_dn_in;
use crate::orthopoly::{assemble_y, biorth_family, ortho_residual, probe_points, sigma_probe, verify_christoffel_darboux, verify_jump_y, verify_recurrences, YMatrix, ORIGIN_FRACTION};
use crate::params::ModelParams;
use crate::real::{Precision, Real};
use crate::rhp::{
    chi_deviation, circle_jump_rate, global_jump_residual, global_parametrix, h_bound_rates, h_coefficients, h_residual, local_cut_jump_residual, matching_rate, r_decay,
    region_consistency, s_near_origin, sigma_jump_residual, RateCheck, TransformChain,
};
use crate::special::log_gamma;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Ortho,
    Recur,
    Cd,
    Diffid,
    Rhp,
    Sigma,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Ortho, Suite::Recur, Suite::Cd, Suite::Diffid, Suite::Rhp, Suite::Sigma];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ortho => "ortho",
            Suite::Recur => "recur",
            Suite::Cd => "cd",
            Suite::Diffid => "diffid",
            Suite::Rhp => "rhp",
            Suite::Sigma => "sigma",
        }
    }

    pub fn default_grid(self) -> Grid {
        let c = |re, im| C64::new(re, im);
        let wide = vec![c(-1.0, 0.0), c(0.5, 0.0), c(1.0, 1.0), c(2.0, 0.0)];
        match self {
            Suite::Ortho | Suite::Recur | Suite::Cd => Grid { ns: vec![4, 8, 12], xs: vec![0.3, 0.5, 0.7], gammas: wide },
            Suite::Diffid => Grid {
                ns: vec![4, 6, 8, 12],
                xs: vec![0.3, 0.5, 0.7],
                gammas: vec![c(-1.0, 0.0), c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(1.0, 1.0)],
            },
            Suite::Rhp => Grid { ns: vec![16, 32, 64, 128], xs: vec![0.5], gammas: vec![c(1.0, 0.0), c(2.0, 0.0)] },
            Suite::Sigma => Grid { ns: vec![8], xs: vec![0.3, 0.5, 0.7], gammas: vec![c(0.5, 0.0), c(1.0, 1.0)] },
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown suite '{s}' (expected ortho, recur, cd, diffid, rhp or sigma)")))
    }
}

/// Parameter grid of a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub ns: Vec<usize>,
    pub xs: Vec<f64>,
    pub gammas: Vec<C64>,
}

impl Grid {
    fn points(&self) -> impl Iterator<Item = (usize, f64, C64)> + '_ {
        self.ns.iter().flat_map(move |&n| self.xs.iter().flat_map(move |&x| self.gammas.iter().map(move |&g| (n, x, g))))
    }
}

/// One residual with its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Where the check ran, e.g. "N=8 x=0.5 gamma=1+0i".
    pub at: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

impl Check {
    /// Passes when residual < tolerance.
    pub fn below(name: &str, at: &str, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), at: at.into(), residual, tolerance, pass: residual < tolerance, note: String::new() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    fn failed(name: &str, at: &str, e: &Error) -> Self {
        Check { name: name.into(), at: at.into(), residual: f64::NAN, tolerance: f64::NAN, pass: false, note: e.to_string() }
    }

    /// A fitted rate: residual |slope − predicted|, or the slope itself when
    /// the check bounds the slope from above.
    pub fn from_rate(name: &str, at: &str, c: &RateCheck, bound_only: bool) -> Self {
        let values = sci_list(&c.values);
        let (residual, note) = match (&c.fit, c.identically_zero) {
            (_, true) => (0.0, format!("identically zero over N={:?}", c.ns)),
            (Some(f), _) if bound_only => (f.slope, format!("slope {:.4} r2 {:.6} values [{values}]", f.slope, f.r2)),
            (Some(f), _) => ((f.slope - c.predicted).abs(), format!("slope {:.4} predicted {:.4} r2 {:.6} values [{values}]", f.slope, c.predicted, f.r2)),
            (None, _) => (f64::NAN, "no fit".into()),
        };
        Check { name: name.into(), at: at.into(), residual, tolerance: c.tolerance, pass: c.pass, note }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub grid: Grid,
    pub precision: Precision,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn sci_list(v: &[f64]) -> String {
    v.iter().map(|r| format!("{r:.6e}")).collect::<Vec<_>>().join(",")
}

fn at(n: usize, x: f64, g: C64) -> String {
    format!("N={n} x={x} gamma={g}")
}

/// Runs every grid point, turning an evaluation error into a failed check.
fn per_point(grid: &Grid, name: &str, mut f: impl FnMut(&ModelParams, &str) -> Result<Vec<Check>>) -> Vec<Check> {
    let mut out = Vec::new();
    for (n, x, g) in grid.points() {
        let a = at(n, x, g);
        match ModelParams::new(n, x, g).and_then(|p| f(&p, &a)) {
            Ok(c) => out.extend(c),
            Err(e) => out.push(Check::failed(name, &a, &e)),
        }
    }
    out
}

pub fn run(suite: Suite, grid: Option<&Grid>, precision: Precision) -> SuiteReport {
    let grid = grid.cloned().unwrap_or_else(|| suite.default_grid());
    let checks = match (suite, precision) {
        (Suite::Ortho, Precision::Double) => ortho::<f64>(&grid),
        (Suite::Ortho, Precision::Extended) => ortho::<Dd>(&grid),
        (Suite::Recur, Precision::Double) => recur::<f64>(&grid),
        (Suite::Recur, Precision::Extended) => recur::<Dd>(&grid),
        (Suite::Cd, Precision::Double) => cd::<f64>(&grid),
        (Suite::Cd, Precision::Extended) => cd::<Dd>(&grid),
        (Suite::Diffid, _) => diffid(&grid, precision),
        (Suite::Rhp, _) => rhp(&grid),
        (Suite::Sigma, _) => sigma(&grid),
    };
    SuiteReport { suite, grid, precision, checks }
}

/// Largest entry of a − b.
fn mat_dist<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> f64 {
    (*a - *b).max_abs().to_f64()
}

/// Largest degree in the biorthogonality matrix check.
const ORTHO_MAX_DEGREE: usize = 10;
/// Largest degree for the |w| = 10³ check: beyond it the 1/w² remainder sits
/// below the cancellation in the Cauchy transforms even in extended precision.
const LARGE_W_MAX_DEGREE: usize = 6;

fn ortho<T: Real>(grid: &Grid) -> Vec<Check> {
    per_point(grid, "ortho", |p, a| {
        let n = p.n;
        let (pairs, _) = biorth_family::<T>(p, n - 1)?;
        let trap = laurent_coefficients::<T>(p, n + 1, &default_circle(p))?;
        let (mut orth, mut lead) = (0.0f64, 0.0f64);
        for pair in pairs.iter().take(ORTHO_MAX_DEGREE + 1) {
            let r = ortho_residual(pair, p, &trap)?;
            orth = orth.max(r.p_offdiag).max(r.p_diag).max(r.q_offdiag).max(r.q_diag);
            lead = lead.max(r.lead_p).max(r.lead_q);
        }
        let tele = {
            let s = pairs.iter().fold(C::new(T::zero(), T::zero()), |acc, q| acc - q.chi.ln() * T::from_f64(2.0));
            let d = log_dn_in::<T>(p, n - 1)?.log_det;
            let s = to_c64(s);
            (s.re - d.log_mag.to_f64()).abs().max(crate::logc::wrap_phase(s.im - d.phase.to_f64()).abs())
        };
        let y = assemble_y::<T>(p, n)?;
        let mut det: f64 = 0.0;
        for w in probe_points(20, 9).into_iter().filter(|w| dist_to_cut(*w, p.x) > 1e-3) {
            det = det.max((to_c64(y.eval(from_c64(w))?.det()) - 1.0).norm());
        }
        let y1 = assemble_y::<T>(p, n + 1)?;
        let lhs = to_c64(-y1.y21_at_zero());
        let rhs = to_c64(y.pj.chi_c() * y.pj.chi_hat_c());
        let jump = normalized_jump(&y)?;
        let large_j = n.min(LARGE_W_MAX_DEGREE);
        let mut out = vec![
            Check::below("biorthogonality against trapezoid moments", a, orth, 1e-9),
            Check::below("leading coefficients and chi_hat ratio", a, lead, 1e-9),
            Check::below("telescoping sum of -2 log chi_j vs log D_{N-1}", a, tele, 1e-8),
            Check::below("det Y = 1", a, det, 1e-8),
            Check::below("-Y_{N+1,21}(0) = chi_N chi_hat_N", a, (lhs - rhs).norm() / rhs.norm(), 1e-7),
            Check::below("Y jump across Sigma", a, jump.0, 1e-4).with_note("relative to max(1, |w^-j f|)"),
            Check::below("Y jump entry (2,1)", a, jump.1, 1e-6).with_note("relative to max(1, |w^-j f|)"),
            analyticity_check::<T>(&y, p, a)?,
            Check::below("Y at |w| = 1e3 after the 1/w term", a, large_w_remainder(p, large_j)?, 1e-6).with_note(format!("degree {large_j}")),
        ];
        if p.gamma.re == -1.0 || p.gamma.re == 1.0 {
            out.push(Check::below("Y converges approaching x from inside Sigma", a, interior_limit(&y)?, 1.0).with_note("largest ratio of successive differences"));
        }
        Ok(out)
    })
}

/// Pairs of points 10⁻⁶ apart straddling the origin-series radius and the
/// circle/stadium boundary of the Cauchy transforms. Returns the largest
/// |Y(w⁺) − Y(w⁻)| over the derivative scale from a 10⁻³ central difference.
fn analyticity<T: Real>(y: &YMatrix<T>) -> Result<f64> {
    let x = y.params.x;
    let centre = C64::new(x / 2.0, 0.0);
    let h = 1e-6;
    let mut pairs = Vec::new();
    for k in 0..8 {
        let e = C64::from_polar(1.0, 0.3 + 0.7 * k as f64);
        let r0 = ORIGIN_FRACTION * sigma_leftmost(x)?.abs();
        pairs.push((e * (r0 - h / 2.0), e));
        pairs.push((centre + e * (circle_switch_radius(x) - h / 2.0), e));
    }
    let mut worst: f64 = 0.0;
    for (w, dir) in pairs.into_iter().filter(|(w, _)| dist_to_cut(*w, x) > 1e-3) {
        let jump = mat_dist(&y.eval(from_c64(w + dir * h))?, &y.eval(from_c64(w))?);
        let coarse = mat_dist(&y.eval(from_c64(w + dir * 1e-3))?, &y.eval(from_c64(w - dir * 1e-3))?) / 2e-3;
        worst = worst.max(jump / coarse);
    }
    Ok(worst)
}

const ANALYTICITY_TOL: f64 = 1e-5;

/// The analyticity probe, rerun in extended precision when double-precision
/// cancellation in Y reaches the tolerance.
fn analyticity_check<T: Real>(y: &YMatrix<T>, p: &ModelParams, a: &str) -> Result<Check> {
    let v = analyticity(y)?;
    if v < ANALYTICITY_TOL || T::DIGITS > 20 {
        return Ok(Check::below("Y analyticity across evaluation switches", a, v, ANALYTICITY_TOL));
    }
    let ext = analyticity(&assemble_y::<Dd>(p, y.j)?)?;
    Ok(Check::below("Y analyticity across evaluation switches", a, ext, ANALYTICITY_TOL).with_note(format!("extended precision; double gave {v:.3e}")))
}

/// Y jump residuals (full matrix, entry (2,1)) after the ε-extrapolation,
/// each point scaled by max(1, |w^{−j}f(w)|).
fn normalized_jump<T: Real>(y: &YMatrix<T>) -> Result<(f64, f64)> {
    let mut worst = (0.0f64, 0.0f64);
    for pt in sigma_probe(y.params.x, 32, 1e-3)? {
        let r = verify_jump_y(y, &[pt], 1e-6)?;
        let scale = (eval_f::<f64>(pt.0, &y.params)? * pt.0.powi(-(y.j as i32))).norm().max(1.0);
        worst = (worst.0.max(r.extrapolated / scale), worst.1.max(r.entry21 / scale));
    }
    Ok(worst)
}

/// Remainders of w^{−j}Y₁₁ − 1 and w^{j}Y₂₂ − 1 after their exact 1/w terms,
/// in extended precision.
fn large_w_remainder(p: &ModelParams, j: usize) -> Result<f64> {
    let y = assemble_y::<Dd>(p, j)?;
    let w: C<Dd> = from_c64(C64::from_polar(1e3, 0.3));
    let m = y.eval(w)?;
    let (a, b) = y.inverse_power_terms();
    let one: C<Dd> = from_c64(C64::new(1.0, 0.0));
    let r11 = to_c64(m.a * w.cpowi(-(j as i32)) - one - a / w);
    let r22 = to_c64(m.d * w.cpowi(j as i32) - one - b / w);
    Ok(r11.norm().max(r22.norm()))
}

/// Largest ratio of successive differences of Y along x + δ_k e^{3iπ/4}.
fn interior_limit<T: Real>(y: &YMatrix<T>) -> Result<f64> {
    let dir = C64::from_polar(1.0, 0.75 * std::f64::consts::PI);
    let vals = (0..10)
        .map(|k| y.eval(from_c64(C64::new(y.params.x, 0.0) + dir * (1e-2 * 0.5f64.powi(k)))))
        .collect::<Result<Vec<_>>>()?;
    let diffs: Vec<f64> = vals.windows(2).map(|v| mat_dist(&v[1], &v[0])).collect();
    Ok(diffs.windows(2).map(|d| d[1] / d[0]).fold(0.0, f64::max))
}

fn recur<T: Real>(grid: &Grid) -> Vec<Check> {
    per_point(grid, "recur", |p, a| {
        let (pairs, _) = biorth_family::<T>(p, p.n - 1)?;
        let pts = probe_points(20, 11);
        let mut worst = [0.0f64; 4];
        for n in 0..pairs.len() - 1 {
            let r = verify_recurrences(&pairs[n], &pairs[n + 1], &pts);
            for (w, v) in worst.iter_mut().zip([r.rec1, r.rec2, r.rec3, r.rec4]) {
                *w = w.max(v);
            }
        }
        Ok(["rec1", "rec2", "rec3", "rec4"].iter().zip(worst).map(|(nm, v)| Check::below(nm, a, v, 1e-8)).collect())
    })
}

fn cd<T: Real>(grid: &Grid) -> Vec<Check> {
    per_point(grid, "cd", |p, a| {
        let (pairs, _) = biorth_family::<T>(p, p.n - 1)?;
        let ws = probe_points(20, 3);
        let us = probe_points(20, 4);
        let r = verify_christoffel_darboux(&pairs, &ws, &us);
        let diag = verify_christoffel_darboux(&pairs, &ws, &ws);
        Ok(vec![
            Check::below("cd1", a, r.cd1, 1e-8),
            Check::below("cd2", a, r.cd2, 1e-8),
            Check::below("cd1 at u = w", a, diag.cd1, 1e-12),
        ])
    })
}

/// Remainder r(N) = rhs − Nx²/2 − Σ-term over these sizes at γ = 1, x = 0.5.
pub const REMAINDER_NS: [usize; 4] = [8, 16, 24, 32];

/// |r(N)| at γ = 1, x = 0.5 in extended precision.
pub fn remainder_trend(ns: &[usize]) -> Result<Vec<f64>> {
    ns.iter()
        .map(|&n| {
            let p = ModelParams::real(n, 0.5, 1.0)?.with_precision(Precision::Extended);
            Ok(rhs_differential_identity(&p, false)?.remainder.norm())
        })
        .collect()
}

fn diffid(grid: &Grid, precision: Precision) -> Vec<Check> {
    let mut out = per_point(grid, "diffid", |p, a| {
        let p = p.with_precision(precision);
        let r = rhs_differential_identity(&p, p.n <= 8)?;
        let mut c = vec![Check::below("differential identity |lhs - rhs| / max(1, |lhs|)", a, r.residual, 1e-5)];
        if let Some(l) = r.limit_check {
            c.push(Check::below("Cauchy limit routes agree", a, l.max_rel_disagreement, LIMIT_AGREE_TOL));
        }
        // Σ-term against a centred difference in γ of Σ_j [log Γ(γ/2+j+1) − (γ/2) log N].
        let h = 1e-5;
        let s = |g: C64| -> Result<C<Dd>> {
            let g: C<Dd> = from_c64(g);
            let half = Dd::from_f64(0.5);
            let ln_n = Dd::from_f64(p.n as f64).ln();
            let mut acc: C<Dd> = from_c64(C64::new(0.0, 0.0));
            for j in 0..p.n {
                acc = acc + log_gamma(g * half + Dd::from_f64(j as f64 + 1.0))? - g * half * ln_n;
            }
            Ok(acc)
        };
        let fd = to_c64((s(p.gamma + h)? - s(p.gamma - h)?) / Dd::from_f64(2.0 * h));
        let t7: C64 = gamma_sum_term::<f64>(&p)?;
        c.push(Check::below("gamma-sum term vs difference of log-gamma sums", a, (fd - t7).norm(), 1e-9));
        Ok(c)
    });
    let trend = format!("gamma=1 x=0.5 N={REMAINDER_NS:?}");
    match remainder_trend(&REMAINDER_NS) {
        Ok(v) => {
            let worst = v.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            let note = sci_list(&v);
            out.push(Check::below("remainder r(N) decreasing", &trend, worst, 1.0).with_note(format!("|r(N)| = [{note}]")));
        }
        Err(e) => out.push(Check::failed("remainder r(N) decreasing", &trend, &e)),
    }
    out
}

fn rhp(grid: &Grid) -> Vec<Check> {
    let mut out = Vec::new();
    for &x in &grid.xs {
        for &g in &grid.gammas {
            let a = format!("x={x} gamma={g}");
            if let Err(e) = rhp_point(x, g, &grid.ns, &a, &mut out) {
                out.push(Check::failed("rhp", &a, &e));
            }
        }
    }
    out
}

/// Sizes for the sup |R − I| decay and the S jump rate.
pub const R_DECAY_NS: [usize; 3] = [8, 16, 32];
/// Fitted exponent of sup |R − I| must not exceed this.
pub const R_DECAY_MAX_SLOPE: f64 = -1.4;
pub const CIRCLE_JUMP_NS: [usize; 3] = [8, 12, 16];
pub const CHI_NS: [usize; 3] = [8, 16, 24];

fn rhp_point(x: f64, g: C64, ns: &[usize], a: &str, out: &mut Vec<Check>) -> Result<()> {
    let p16 = ModelParams::new(16, x, g)?;
    for r in 0..=2 {
        let b = h_coefficients::<f64>(&p16.with_k(1), r)?;
        out.push(Check::below(&format!("h_{r} removes the principal part at x"), &format!("N=16 k=1 {a}"), h_residual(&b)?, 1e-8));
        out.push(Check::from_rate(&format!("matching residual rate r={r}"), a, &matching_rate(x, g, 0, r, ns)?, false));
    }
    for c in h_bound_rates(x, g, 0, 1, ns)? {
        out.push(Check::from_rate(&format!("h bound rate: {}", c.what), &format!("r=1 {a}"), &c, false));
    }
    let b = h_coefficients::<f64>(&p16.with_k(1), 1)?;
    let far = global_parametrix(from_c64(C64::from_polar(1e3, 0.7)), &b)?;
    out.push(Check::below("global parametrix at |w| = 1e3", &format!("N=16 {a}"), far.dist_identity(), 2e-3));
    let pts = sigma_probe(x, 32, 1e-2)?;
    out.push(Check::below("global parametrix jump on Sigma", &format!("N=16 {a}"), global_jump_residual(&b, &pts, 1e-6)?, 1e-8));
    let b0 = h_coefficients::<f64>(&p16, 1)?;
    // With γ = 2 the sine in the (0, x) jump vanishes and only quadrature noise remains.
    let cut_tol = if g == C64::new(2.0, 0.0) { 1e-8 } else { 1e-6 };
    out.push(Check::below("local parametrix jump on (0, x)", &format!("N=16 {a}"), local_cut_jump_residual(&b0, 8, 1e-6)?, cut_tol));
    let near: Vec<_> = sigma_probe(x, 256, 1e-2)?.into_iter().filter(|(w, _)| b0.in_disk(*w)).collect();
    out.push(Check::below("local parametrix jump on Sigma", &format!("N=16 {a}"), sigma_jump_residual(&b0, &near, 1e-6, true)?, 1e-6));
    let chain = TransformChain::<f64>::new(&ModelParams::new(12, x, g)?, 1)?;
    let rc = region_consistency(&chain, 16, 1e-9)?;
    out.push(Check {
        name: "R inside vs outside the disk".into(),
        at: format!("N=12 r=1 {a}"),
        residual: rc.difference,
        tolerance: 2.0 * rc.matching + rc.noise,
        pass: rc.pass(),
        note: format!("matching {:.3e}, offset noise {:.3e}", rc.matching, rc.noise),
    });
    let s = s_near_origin(&chain, &[1e-2, 1e-3, 1e-4, 1e-5])?;
    out.push(Check::below("S converges at the origin", &format!("N=12 {a}"), s[2] / s[0], 1.0).with_note(format!("differences [{}]", sci_list(&s))));
    if g.re < 2.0 {
        out.push(Check::from_rate("sup |R - I| decreasing with slope <= -1.4", &format!("r=1 N={R_DECAY_NS:?} {a}"), &r_decay(x, g, 0, 1, &R_DECAY_NS, R_DECAY_MAX_SLOPE)?, true));
        let (c, _) = circle_jump_rate(x, g, 0, &CIRCLE_JUMP_NS)?;
        out.push(Check::from_rate("S unit-circle jump: log residual linear with negative slope", &format!("N={CIRCLE_JUMP_NS:?} {a}"), &c, true));
    }
    let dev = CHI_NS.iter().map(|&n| chi_deviation::<Dd>(&ModelParams::new(n, x, g)?)).collect::<Result<Vec<_>>>()?;
    let worst = dev.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    out.push(Check::below("chi deviation decreasing", &format!("N={CHI_NS:?} {a}"), worst, 1.0).with_note(format!("deviations [{}]", sci_list(&dev))));
    Ok(())
}

fn sigma(grid: &Grid) -> Vec<Check> {
    let mut out = Vec::new();
    for &x in &grid.xs {
        let a = format!("x={x}");
        match sigma_point_checks(x, &a) {
            Ok(c) => out.extend(c),
            Err(e) => out.push(Check::failed("sigma", &a, &e)),
        }
        for &n in &grid.ns {
            for &g in &grid.gammas {
                let a = at(n, x, g);
                match ModelParams::new(n, x, g).and_then(|p| branch_jump(&p)) {
                    Ok(r) => out.push(Check::below("f jump across (0, x) is e^{i pi gamma}", &a, r, 1e-4)),
                    Err(e) => out.push(Check::failed("f jump across (0, x)", &a, &e)),
                }
            }
        }
    }
    out
}

fn sigma_point_checks(x: f64, a: &str) -> Result<Vec<Check>> {
    let on = build_sigma(x, 200)?
        .into_iter()
        .filter(|s| s.w.im != 0.0 || s.w.re > 0.0)
        .map(|s| phase(s.w, x).map(|v| v.re.abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut min_inside = f64::INFINITY;
    let mut count = 0;
    let mut rng = crate::rng::Philox::for_sample(17, 0);
    while count < 200 {
        let th = 2.0 * std::f64::consts::PI * rng.next_f64();
        let t = 0.02 + 0.96 * rng.next_f64();
        let w = C64::from_polar(t * sigma_radius(x, th), th);
        if dist_to_cut(w, x) < 1e-3 || (w.im == 0.0 && w.re <= 0.0) {
            continue;
        }
        min_inside = min_inside.min(phase(w, x)?.re);
        count += 1;
    }
    let bound = x + ell(x);
    let max_circle = (0..200)
        .map(|i| phase(C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / 200.0), x).map(|v| v.re))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![
        Check::below("Re phase vanishes on Sigma", a, on, 1e-12),
        Check::below("Re phase > 0 inside Sigma", a, -min_inside, 0.0).with_note(format!("min Re phase {min_inside:.6e} over 200 points")),
        Check::below("Re phase <= x + log x - x^2 on |w| = 1", a, max_circle - bound, 1e-12).with_note(format!("max {max_circle:.15e}, bound {bound:.15e}")),
    ])
}

/// max |f(w₀+iε)/f(w₀−iε) − e^{iπγ}| / |e^{iπγ}| over w₀ ∈ (0, x).
fn branch_jump(p: &ModelParams) -> Result<f64> {
    let eps = 1e-6;
    let want = (C64::new(0.0, std::f64::consts::PI) * p.gamma).exp();
    let mut worst: f64 = 0.0;
    for i in 1..10 {
        let w0 = p.x * i as f64 / 10.0;
        let up = eval_f::<f64>(C64::new(w0, eps), p)?;
        let down = eval_f::<f64>(C64::new(w0, -eps), p)?;
        worst = worst.max((up / down - want).norm() / want.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn sigma_suite_passes() {
        let r = run(Suite::Sigma, None, Precision::Double);
        assert!(r.pass(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.checks.len(), 3 * 3 + 3 * 2);
    }

    #[test]
    fn evaluation_errors_become_failed_checks() {
        let grid = Grid { ns: vec![4], xs: vec![1.5], gammas: vec![C64::new(1.0, 0.0)] };
        let r = run(Suite::Recur, Some(&grid), Precision::Double);
        assert!(!r.pass() && r.checks[0].residual.is_nan() && !r.checks[0].note.is_empty());
    }
}
