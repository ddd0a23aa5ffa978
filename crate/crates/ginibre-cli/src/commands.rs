//! Subcommand bodies. Each returns the primary output and an exit status.

use ginibre::asymptotic::{conjecture_eval, log_asymptotic, CONJECTURE_LABEL};
use ginibre::dd::Dd;
use ginibre::logc::wrap_phase;
use ginibre::moments::{log_expectation, Evaluated};
use ginibre::montecarlo::{clt_statistic, mc_moment, mc_product_moment};
use ginibre::rhp::{chi_deviation, h_coefficients, matching_residual, r_residual_escalating};
use ginibre::suites::{self, Grid, Suite};
use ginibre::{ModelParams, Precision};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::output::{num, Status, Table};

/// Primary output plus what the manifest needs to know.
pub struct Run {
    pub body: String,
    pub status: Status,
    pub grid: serde_json::Value,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub k: i32,
}

fn grid_json(ns: &[usize], xs: &[f64], gammas: &[C64]) -> serde_json::Value {
    json!({
        "n": ns,
        "x": xs,
        "gamma": gammas.iter().map(|g| [g.re, g.im]).collect::<Vec<_>>(),
    })
}

fn points(ns: &[usize], xs: &[f64], gammas: &[C64]) -> Vec<(usize, f64, C64)> {
    let mut out = Vec::with_capacity(ns.len() * xs.len() * gammas.len());
    for &n in ns {
        for &x in xs {
            for &g in gammas {
                out.push((n, x, g));
            }
        }
    }
    out
}

fn evaluate(n: usize, x: f64, g: C64, k: i32, precision: Precision) -> ginibre::Result<Evaluated> {
    log_expectation(&ModelParams::new(n, x, g)?.with_k(k).with_precision(precision))
}

fn error_status(msg: &ginibre::Error) -> String {
    format!("error: {msg}")
}

pub fn exact(ns: &[usize], xs: &[f64], gammas: &[C64], k: i32, precision: Precision) -> Run {
    let pts = points(ns, xs, gammas);
    let results: Vec<_> = pts.par_iter().map(|&(n, x, g)| evaluate(n, x, g, k, precision)).collect();
    let mut t = Table::new(&["N", "x", "gamma_re", "gamma_im", "log_mag", "phase", "precision_used", "cond_flag", "status"]);
    let mut status = Status::Ok;
    for (&(n, x, g), r) in pts.iter().zip(&results) {
        let head = [n.to_string(), num(x), num(g.re), num(g.im)];
        match r {
            Ok(e) => t.row(head.into_iter().chain([
                num(e.value.log_mag),
                num(e.value.phase),
                e.precision_used.name().to_string(),
                e.cond_flag.to_string(),
                "ok".to_string(),
            ])),
            Err(err) => {
                status = status.merge(Status::of_error(err));
                t.row(head.into_iter().chain([String::new(), String::new(), String::new(), String::new(), error_status(err)]));
            }
        }
    }
    Run { body: t.finish(), status, grid: grid_json(ns, xs, gammas), seed: None, samples: None, k }
}

pub fn compare(ns: &[usize], xs: &[f64], gammas: &[C64], k: i32, precision: Precision) -> Run {
    let pts = points(ns, xs, gammas);
    let results: Vec<_> = pts
        .par_iter()
        .map(|&(n, x, g)| -> ginibre::Result<(Evaluated, C64)> { Ok((evaluate(n, x, g, k, precision)?, log_asymptotic(n, x, g)?)) })
        .collect();
    let mut t = Table::new(&[
        "N",
        "x",
        "gamma_re",
        "gamma_im",
        "log_exact_re",
        "log_exact_im",
        "log_asymptotic_re",
        "log_asymptotic_im",
        "residual_re",
        "residual_im",
        "precision_used",
        "cond_flag",
        "status",
    ]);
    let mut status = Status::Ok;
    for (&(n, x, g), r) in pts.iter().zip(&results) {
        let head = [n.to_string(), num(x), num(g.re), num(g.im)];
        match r {
            Ok((e, a)) => {
                let res_re = e.value.log_mag - a.re;
                let res_im = wrap_phase(e.value.phase - a.im);
                t.row(head.into_iter().chain([
                    num(e.value.log_mag),
                    num(e.value.phase),
                    num(a.re),
                    num(a.im),
                    num(res_re),
                    num(res_im),
                    e.precision_used.name().to_string(),
                    e.cond_flag.to_string(),
                    "ok".to_string(),
                ]))
            }
            Err(err) => {
                status = status.merge(Status::of_error(err));
                t.row(head.into_iter().chain(std::iter::repeat(String::new()).take(8)).chain([error_status(err)]));
            }
        }
    }
    Run { body: t.finish(), status, grid: grid_json(ns, xs, gammas), seed: None, samples: None, k }
}

#[derive(Serialize)]
struct CheckJson<'a> {
    name: &'a str,
    at: &'a str,
    /// `null` when the evaluation itself failed.
    residual: Option<f64>,
    tolerance: f64,
    pass: bool,
    #[serde(skip_serializing_if = "str::is_empty")]
    note: &'a str,
}

#[derive(Serialize)]
struct SuiteJson<'a> {
    suite: &'a str,
    precision: &'a str,
    grid: serde_json::Value,
    pass: bool,
    checks_total: usize,
    checks_failed: usize,
    checks: Vec<CheckJson<'a>>,
}

pub fn verify(suite: Suite, ns: Option<Vec<usize>>, xs: Option<Vec<f64>>, gammas: Option<Vec<C64>>, precision: Precision) -> Run {
    let d = suite.default_grid();
    let overridden = ns.is_some() || xs.is_some() || gammas.is_some();
    let grid = Grid { ns: ns.unwrap_or(d.ns), xs: xs.unwrap_or(d.xs), gammas: gammas.unwrap_or(d.gammas) };
    let report = suites::run(suite, overridden.then_some(&grid), precision);
    let gj = grid_json(&report.grid.ns, &report.grid.xs, &report.grid.gammas);
    let doc = SuiteJson {
        suite: suite.name(),
        precision: precision.name(),
        grid: gj.clone(),
        pass: report.pass(),
        checks_total: report.checks.len(),
        checks_failed: report.failures().count(),
        checks: report
            .checks
            .iter()
            .map(|c| CheckJson {
                name: &c.name,
                at: &c.at,
                residual: c.residual.is_finite().then_some(c.residual),
                tolerance: c.tolerance,
                pass: c.pass,
                note: &c.note,
            })
            .collect(),
    };
    let body = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    let status = if report.pass() { Status::Ok } else { Status::CheckFailed };
    Run { body, status, grid: gj, seed: None, samples: None, k: 0 }
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn mc(ns: &[usize], zs: &[C64], gammas: &[C64], samples: usize, seed: u64) -> Run {
    let mut t = Table::new(&[
        "N",
        "z_re",
        "z_im",
        "gamma_re",
        "gamma_im",
        "samples",
        "seed",
        "mean_re",
        "mean_im",
        "std_error",
        "resamples",
        "kurtosis",
        "median_of_means_re",
        "median_of_means_im",
        "status",
    ]);
    let mut status = Status::Ok;
    for &n in ns {
        for &z in zs {
            for &g in gammas {
                let head = [n.to_string(), num(z.re), num(z.im), num(g.re), num(g.im), samples.to_string(), seed.to_string()];
                match mc_moment(n, z, g, samples, seed) {
                    Ok(e) => t.row(head.into_iter().chain([
                        num(e.mean.re),
                        num(e.mean.im),
                        num(e.std_error),
                        e.resamples.to_string(),
                        num(e.kurtosis),
                        opt_num(e.median_of_means.map(|m| m.re)),
                        opt_num(e.median_of_means.map(|m| m.im)),
                        "ok".to_string(),
                    ])),
                    Err(err) => {
                        status = status.merge(Status::of_error(&err));
                        t.row(head.into_iter().chain(std::iter::repeat(String::new()).take(7)).chain([error_status(&err)]));
                    }
                }
            }
        }
    }
    let grid = json!({ "n": ns, "z": zs.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(), "gamma": gammas.iter().map(|g| [g.re, g.im]).collect::<Vec<_>>() });
    Run { body: t.finish(), status, grid, seed: Some(seed), samples: Some(samples), k: 0 }
}

pub fn clt(ns: &[usize], zs: &[C64], samples: usize, seed: u64) -> Run {
    let mut t = Table::new(&["N", "z_re", "z_im", "samples", "seed", "mean", "variance", "status"]);
    let mut status = Status::Ok;
    for &n in ns {
        for &z in zs {
            let head = [n.to_string(), num(z.re), num(z.im), samples.to_string(), seed.to_string()];
            match clt_statistic(n, z, samples, seed) {
                Ok(c) => t.row(head.into_iter().chain([num(c.mean), num(c.variance), "ok".to_string()])),
                Err(err) => {
                    status = status.merge(Status::of_error(&err));
                    t.row(head.into_iter().chain([String::new(), String::new(), error_status(&err)]));
                }
            }
        }
    }
    let grid = json!({ "n": ns, "z": zs.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>() });
    Run { body: t.finish(), status, grid, seed: Some(seed), samples: Some(samples), k: 0 }
}

/// Conjectured multi-point product against a Monte Carlo estimate of the same
/// expectation. The ratio is reported, never gated.
pub fn conjecture(ns: &[usize], pts: &[(C64, C64)], samples: usize, seed: u64) -> Run {
    let mut t = Table::new(&[
        "label",
        "N",
        "points",
        "samples",
        "seed",
        "log_conjecture_re",
        "log_conjecture_im",
        "mc_mean_re",
        "mc_mean_im",
        "mc_std_error",
        "ratio_re",
        "ratio_im",
        "status",
    ]);
    let described = pts.iter().map(|(z, g)| format!("z={z} gamma={g}")).collect::<Vec<_>>().join("; ");
    let mut status = Status::Ok;
    for &n in ns {
        let head = [CONJECTURE_LABEL.to_string(), n.to_string(), described.clone(), samples.to_string(), seed.to_string()];
        let row = conjecture_eval(pts, n).and_then(|c| Ok((c, mc_product_moment(n, pts, samples, seed)?)));
        match row {
            Ok((c, e)) => {
                let ratio = e.mean / c.to_complex();
                t.row(head.into_iter().chain([
                    num(c.log_mag),
                    num(c.phase),
                    num(e.mean.re),
                    num(e.mean.im),
                    num(e.std_error),
                    num(ratio.re),
                    num(ratio.im),
                    "ok".to_string(),
                ]))
            }
            Err(err) => {
                status = status.merge(Status::of_error(&err));
                t.row(head.into_iter().chain(std::iter::repeat(String::new()).take(7)).chain([error_status(&err)]));
            }
        }
    }
    let grid = json!({
        "n": ns,
        "points": pts.iter().map(|(z, g)| json!({ "z": [z.re, z.im], "gamma": [g.re, g.im] })).collect::<Vec<_>>(),
    });
    Run { body: t.finish(), status, grid, seed: Some(seed), samples: Some(samples), k: 0 }
}

/// Default number of probe points on the local disk boundary.
const MATCH_PROBES: usize = 64;

pub fn rhp_sweep(ns: &[usize], xs: &[f64], gammas: &[C64], orders: &[usize], k: i32) -> Run {
    let mut pts = Vec::new();
    for (n, x, g) in points(ns, xs, gammas) {
        for &r in orders {
            pts.push((n, x, g, r));
        }
    }
    let results: Vec<_> = pts
        .par_iter()
        .map(|&(n, x, g, r)| -> ginibre::Result<([String; 7], Vec<String>)> {
            let p = ModelParams::new(n, x, g)?.with_k(k);
            let b = h_coefficients::<f64>(&p, r)?;
            let matching = matching_residual(&b, MATCH_PROBES)?;
            // R and χ need the orthogonal polynomials themselves, which stop
            // being computable once the moment matrix is singular; those
            // columns are then left empty and the reason goes to `status`.
            let mut missing = Vec::new();
            let (r_sup, r_det, r_prec) = match r_residual_escalating(&p, r) {
                Ok(rr) => (num(rr.sup), num(rr.det_dev), rr.precision.name().to_string()),
                Err(e) => {
                    missing.push(format!("R: {e}"));
                    (String::new(), String::new(), String::new())
                }
            };
            let chi = chi_deviation::<Dd>(&p).map(num).unwrap_or_else(|e| {
                missing.push(format!("chi: {e}"));
                String::new()
            });
            Ok(([num(matching), num(b.h_at_zero().norm()), num(b.gap_at_x.norm()), r_sup, r_det, r_prec, chi], missing))
        })
        .collect();
    let mut t = Table::new(&[
        "N",
        "x",
        "gamma_re",
        "gamma_im",
        "k",
        "r",
        "matching_residual",
        "h_at_zero_abs",
        "gap_abs",
        "r_sup",
        "r_det_dev",
        "r_precision",
        "chi_deviation",
        "status",
    ]);
    let mut status = Status::Ok;
    for (&(n, x, g, r), res) in pts.iter().zip(&results) {
        let head = [n.to_string(), num(x), num(g.re), num(g.im), k.to_string(), r.to_string()];
        match res {
            Ok((cols, missing)) => {
                let note = if missing.is_empty() { "ok".to_string() } else { format!("partial: {}", missing.join("; ")) };
                t.row(head.into_iter().chain(cols.iter().cloned()).chain([note]))
            }
            Err(err) => {
                status = status.merge(Status::of_error(err));
                t.row(head.into_iter().chain(std::iter::repeat(String::new()).take(7)).chain([error_status(err)]));
            }
        }
    }
    let mut grid = grid_json(ns, xs, gammas);
    grid["r"] = json!(orders);
    Run { body: t.finish(), status, grid, seed: None, samples: None, k }
}
